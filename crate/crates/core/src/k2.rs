//! Basic k²-tree with `k = 2` on every level.
//!
//! Level `l` holds four bits per non-empty node at depth `l` of the
//! quadtree, in breadth-first order; the last level holds the cell bits. The
//! children of the 1 at position `p` of level `l` start at
//! `4 * rank1(level_l, p)` in level `l + 1`.

use crate::bitvec::{BitBuf, BitVector, RankSelect};
use crate::builder::PointSet;
use crate::error::{Error, Result};
use crate::hpindex::Rect;
use crate::morton::{interleave, GridSpec, Point};
use crate::stats::{SpaceStats, Structure};

#[derive(Debug, Clone)]
pub struct K2Index {
    grid: GridSpec,
    n: u64,
    levels: Vec<BitVector>,
}

impl K2Index {
    pub fn build(ps: &PointSet) -> Self {
        let grid = ps.grid();
        let lg = grid.lg_u();
        let labels: Vec<u64> = ps.labels().collect();
        let mut levels = Vec::new();
        if !labels.is_empty() {
            let mut frontier: Vec<&[u64]> = vec![&labels];
            for depth in 0..lg {
                let shift = 2 * (lg - depth - 1);
                let mut bits = BitBuf::with_capacity(4 * frontier.len());
                let mut next = Vec::new();
                for mut rest in frontier {
                    for q in 0..4 {
                        let split = rest.partition_point(|&l| l >> shift & 3 == q);
                        bits.push(split > 0);
                        if split > 0 {
                            next.push(&rest[..split]);
                        }
                        rest = &rest[split..];
                    }
                }
                levels.push(BitVector::build(bits));
                frontier = next;
            }
        }
        Self {
            grid,
            n: labels.len() as u64,
            levels,
        }
    }

    /// Assembles an index from raw level bitmaps, checking the level sizes.
    pub fn from_parts(grid: GridSpec, n: u64, levels: Vec<BitBuf>) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedIndex(msg));
        let lg = grid.lg_u() as usize;
        if n == 0 {
            if levels.iter().any(|l| !l.is_empty()) {
                return bad("empty k2 index with level bits".into());
            }
            return Ok(Self {
                grid,
                n,
                levels: Vec::new(),
            });
        }
        if levels.len() != lg {
            return bad(format!("{} k2 levels for lg_u = {lg}", levels.len()));
        }
        if lg == 0 && n != 1 {
            return bad(format!("{n} points on a 1x1 grid"));
        }
        let mut expected = 4;
        for (l, bits) in levels.iter().enumerate() {
            if bits.len() != expected {
                return bad(format!(
                    "k2 level {l} has {} bits, expected {expected}",
                    bits.len()
                ));
            }
            expected = 4 * bits.count_ones();
        }
        if let Some(last) = levels.last() {
            if last.count_ones() as u64 != n {
                return bad(format!(
                    "k2 last level holds {} cells, header says {n}",
                    last.count_ones()
                ));
            }
        }
        Ok(Self {
            grid,
            n,
            levels: levels.into_iter().map(BitVector::build).collect(),
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn levels(&self) -> &[BitVector] {
        &self.levels
    }

    /// Nodes of the equivalent quadtree, root included.
    pub fn node_count(&self) -> usize {
        1 + self.levels.iter().map(RankSelect::len).sum::<usize>()
    }

    pub fn contains(&self, p: Point) -> Result<bool> {
        let label = interleave(p, self.grid)?;
        if self.is_empty() {
            return Ok(false);
        }
        let lg = self.grid.lg_u();
        let mut base = 0usize;
        for (depth, level) in self.levels.iter().enumerate() {
            let q = (label.value() >> (2 * (lg - depth as u32 - 1)) & 3) as usize;
            let pos = base + q;
            if !level.get(pos) {
                return Ok(false);
            }
            base = 4 * level.rank1(pos);
        }
        Ok(true)
    }

    /// All points inside `r`, in Morton order.
    pub fn range_report(&self, r: Rect) -> Result<Vec<Point>> {
        r.validate(self.grid)?;
        let mut out = Vec::new();
        if self.is_empty() || r.is_empty() {
            return Ok(out);
        }
        let lg = self.grid.lg_u();
        if lg == 0 {
            out.push(Point::new(0, 0));
            return Ok(out);
        }
        // (depth of the children block, block base, x and y of the parent)
        let mut stack = vec![(0u32, 0usize, 0u64, 0u64)];
        let mut kids = Vec::with_capacity(4);
        while let Some((depth, base, x, y)) = stack.pop() {
            let level = &self.levels[depth as usize];
            let side = 1u64 << (lg - depth - 1);
            for q in 0..4u64 {
                let (cx, cy) = (x << 1 | (q & 1), y << 1 | q >> 1);
                let pos = base + q as usize;
                if !level.get(pos) {
                    continue;
                }
                let (x0, y0) = (cx * side, cy * side);
                if !(x0 < r.x1 && r.x0 < x0 + side && y0 < r.y1 && r.y0 < y0 + side) {
                    continue;
                }
                if depth + 1 == lg {
                    out.push(Point::new(cx as u32, cy as u32));
                } else {
                    kids.push((depth + 1, 4 * level.rank1(pos), cx, cy));
                }
            }
            stack.extend(kids.drain(..).rev());
        }
        Ok(out)
    }

    pub fn space_stats(&self) -> SpaceStats {
        let payload: usize = self.levels.iter().map(RankSelect::len).sum();
        let aux: usize = self.levels.iter().map(RankSelect::aux_bits).sum();
        SpaceStats::new(
            Structure::K2Tree,
            self.n,
            self.grid.lg_u(),
            self.node_count(),
            None,
            None,
            payload,
            aux,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::build_quadtree;
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(lg: u32) -> GridSpec {
        GridSpec::new(lg).unwrap()
    }

    #[test]
    fn empty() {
        let k2 = K2Index::build(&PointSet::empty(grid(4)));
        assert!(k2.levels().is_empty());
        assert!(!k2.contains(Point::new(3, 3)).unwrap());
        assert!(k2.range_report(Rect::whole(grid(4))).unwrap().is_empty());
    }

    #[test]
    fn single_quadrant() {
        let k2 = K2Index::build(&PointSet::new(grid(1), [Point::new(0, 0)]).unwrap());
        assert_eq!(k2.levels().len(), 1);
        assert_eq!(k2.levels()[0].to_bit_buf().to_bit_string(), "1000");
        assert!(k2.contains(Point::new(0, 0)).unwrap());
        assert!(!k2.contains(Point::new(1, 0)).unwrap());
    }

    #[test]
    fn unit_grid() {
        let k2 = K2Index::build(&PointSet::new(grid(0), [Point::new(0, 0)]).unwrap());
        assert!(k2.contains(Point::new(0, 0)).unwrap());
        assert_eq!(
            k2.range_report(Rect::whole(grid(0))).unwrap(),
            vec![Point::new(0, 0)]
        );
        assert!(k2.contains(Point::new(1, 0)).is_err());
    }

    #[test]
    fn random_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let lg = rng.random_range(1..=6);
            let g = grid(lg);
            let side = g.side();
            let n = rng.random_range(0..500);
            let ps = PointSet::new(
                g,
                (0..n).map(|_| {
                    Point::new(
                        rng.random_range(0..side) as u32,
                        rng.random_range(0..side) as u32,
                    )
                }),
            )
            .unwrap();
            let k2 = K2Index::build(&ps);
            assert_eq!(k2.node_count(), build_quadtree(&ps).node_count());
            for w in k2.levels().windows(2) {
                assert_eq!(w[1].len(), 4 * w[0].count_ones());
            }
            for y in 0..side as u32 {
                for x in 0..side as u32 {
                    let p = Point::new(x, y);
                    assert_eq!(k2.contains(p).unwrap(), oracle::naive_membership(&ps, p));
                }
            }
            for _ in 0..20 {
                let (a, b) = (rng.random_range(0..=side), rng.random_range(0..=side));
                let (c, d) = (rng.random_range(0..=side), rng.random_range(0..=side));
                let r = Rect::new(a.min(b), c.min(d), a.max(b), c.max(d));
                assert_eq!(k2.range_report(r).unwrap(), oracle::naive_range(&ps, r));
            }
            let rebuilt = K2Index::from_parts(
                g,
                k2.len(),
                k2.levels().iter().map(|l| l.to_bit_buf()).collect(),
            )
            .unwrap();
            assert_eq!(rebuilt.range_report(Rect::whole(g)).unwrap(), ps.points());
        }
    }

    #[test]
    fn malformed_levels_rejected() {
        let g = grid(2);
        let lv = |s: &str| BitBuf::from_bit_str(s);
        assert!(K2Index::from_parts(g, 1, vec![lv("1000"), lv("0100")]).is_ok());
        assert!(K2Index::from_parts(g, 1, vec![lv("1000"), lv("01000000")]).is_err());
        assert!(K2Index::from_parts(g, 2, vec![lv("1000"), lv("0100")]).is_err());
        assert!(K2Index::from_parts(g, 0, vec![lv("1000")]).is_err());
    }
}
