//! On-disk formats.
//!
//! Index files (all integers little-endian):
//!
//! ```text
//! "HPQ1" | tag u8 (0 = hp, 1 = k2) | flags u8 (bit 0: empty set) | lg_u u8 | 0u8 | n u64
//! hp: paths_starting_at[2 lg_u + 1] u64 | |H| u64 | H words | L_0 words | ... | L_{2 lg_u - 1} words
//! k2: level bit lengths[lg_u] u64 | level 0 words | ... | level lg_u - 1 words
//! ```
//!
//! Every bit payload is packed LSB-first into whole 64-bit words. The
//! lengths of the `L_d` payloads follow from the path counts. Rank and
//! select directories are rebuilt on load.
//!
//! Points files are text with one `x y` pair per line; blank lines and lines
//! starting with `#` are ignored.

use crate::bitvec::{BitBuf, RankSelect};
use crate::builder::{build_index, PointSet};
use crate::error::{Error, Result};
use crate::hpindex::{HPIndex, QueryTrace, Rect};
use crate::k2::K2Index;
use crate::morton::{GridSpec, Point};
use crate::stats::{SpaceStats, Structure};

pub const MAGIC: &[u8; 4] = b"HPQ1";
const TAG_HP: u8 = 0;
const TAG_K2: u8 = 1;
const FLAG_EMPTY: u8 = 1;

/// Either index structure, as stored in an index file.
#[derive(Debug, Clone)]
pub enum StoredIndex {
    Hp(HPIndex),
    K2(K2Index),
}

impl StoredIndex {
    pub fn build(ps: &PointSet, structure: Structure) -> Self {
        match structure {
            Structure::HeavyPath => StoredIndex::Hp(build_index(ps)),
            Structure::K2Tree => StoredIndex::K2(K2Index::build(ps)),
        }
    }

    pub fn structure(&self) -> Structure {
        match self {
            StoredIndex::Hp(_) => Structure::HeavyPath,
            StoredIndex::K2(_) => Structure::K2Tree,
        }
    }

    pub fn grid(&self) -> GridSpec {
        match self {
            StoredIndex::Hp(i) => i.grid(),
            StoredIndex::K2(i) => i.grid(),
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            StoredIndex::Hp(i) => i.len(),
            StoredIndex::K2(i) => i.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, p: Point) -> Result<bool> {
        match self {
            StoredIndex::Hp(i) => i.contains(p),
            StoredIndex::K2(i) => i.contains(p),
        }
    }

    /// Heavy-path trace; `None` for a k²-tree.
    pub fn membership_trace(&self, p: Point) -> Result<Option<QueryTrace>> {
        match self {
            StoredIndex::Hp(i) => Ok(Some(i.membership(p)?.1)),
            StoredIndex::K2(i) => i.contains(p).map(|_| None),
        }
    }

    pub fn range_report(&self, r: Rect) -> Result<Vec<Point>> {
        match self {
            StoredIndex::Hp(i) => i.range_report(r),
            StoredIndex::K2(i) => i.range_report(r),
        }
    }

    pub fn points(&self) -> Result<Vec<Point>> {
        match self {
            StoredIndex::Hp(i) => Ok(crate::builder::decode(i)?.points().to_vec()),
            StoredIndex::K2(i) => i.range_report(Rect::whole(i.grid())),
        }
    }

    pub fn space_stats(&self) -> SpaceStats {
        match self {
            StoredIndex::Hp(i) => i.space_stats(),
            StoredIndex::K2(i) => i.space_stats(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        let (tag, grid, n) = match self {
            StoredIndex::Hp(i) => (TAG_HP, i.grid(), i.len()),
            StoredIndex::K2(i) => (TAG_K2, i.grid(), i.len()),
        };
        out.push(tag);
        out.push(if n == 0 { FLAG_EMPTY } else { 0 });
        out.push(grid.lg_u() as u8);
        out.push(0);
        put_u64(&mut out, n);
        match self {
            StoredIndex::Hp(i) => {
                for &c in i.paths_starting_at() {
                    put_u64(&mut out, c);
                }
                let h = i.h_bits();
                put_u64(&mut out, h.len() as u64);
                put_words(&mut out, &h);
                for l in i.level_bits() {
                    put_words(&mut out, &l);
                }
            }
            StoredIndex::K2(i) => {
                let levels: Vec<BitBuf> = i.levels().iter().map(RankSelect::to_bit_buf).collect();
                for d in 0..grid.lg_u() as usize {
                    put_u64(&mut out, levels.get(d).map_or(0, |l| l.len() as u64));
                }
                for l in &levels {
                    put_words(&mut out, l);
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, at: 0 };
        if r.take(4)? != MAGIC {
            return corrupt("bad magic");
        }
        let tag = r.u8()?;
        let flags = r.u8()?;
        let lg_u = r.u8()?;
        let _reserved = r.u8()?;
        let n = r.u64()?;
        let grid =
            GridSpec::new(u32::from(lg_u)).map_err(|e| Error::MalformedIndex(e.to_string()))?;
        if flags & !FLAG_EMPTY != 0 {
            return corrupt(&format!("unknown flags {flags:#04x}"));
        }
        if (flags & FLAG_EMPTY != 0) != (n == 0) {
            return corrupt("empty flag disagrees with the point count");
        }
        let index = match tag {
            TAG_HP => {
                let counts = (0..=grid.label_len())
                    .map(|_| r.u64())
                    .collect::<Result<Vec<u64>>>()?;
                let h_len = r.len()?;
                let h = r.bits(h_len)?;
                let mut levels = Vec::with_capacity(grid.label_len() as usize);
                let mut covering = 0u64;
                for &c in counts.iter().take(grid.label_len() as usize) {
                    covering = covering
                        .checked_add(c)
                        .ok_or_else(|| Error::MalformedIndex("path count overflow".into()))?;
                    levels.push(r.bits(usize::try_from(covering).unwrap_or(usize::MAX))?);
                }
                let idx = HPIndex::from_parts(grid, counts, h, levels)?;
                if idx.len() != n {
                    return corrupt(&format!("header says {n} points, paths say {}", idx.len()));
                }
                StoredIndex::Hp(idx)
            }
            TAG_K2 => {
                let lens = (0..grid.lg_u())
                    .map(|_| r.len())
                    .collect::<Result<Vec<usize>>>()?;
                let levels = if n == 0 {
                    if lens.iter().any(|&l| l != 0) {
                        return corrupt("empty k2 index with level bits");
                    }
                    Vec::new()
                } else {
                    lens.iter()
                        .map(|&l| r.bits(l))
                        .collect::<Result<Vec<_>>>()?
                };
                StoredIndex::K2(K2Index::from_parts(grid, n, levels)?)
            }
            t => return corrupt(&format!("unknown structure tag {t}")),
        };
        if r.at != bytes.len() {
            return corrupt(&format!("{} trailing bytes", bytes.len() - r.at));
        }
        Ok(index)
    }
}

fn corrupt<T>(msg: &str) -> Result<T> {
    Err(Error::MalformedIndex(msg.to_string()))
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_words(out: &mut Vec<u8>, bits: &BitBuf) {
    for &w in bits.words() {
        put_u64(out, w);
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self
            .at
            .checked_add(k)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::MalformedIndex("unexpected end of file".into()))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::MalformedIndex("length overflow".into()))
    }

    fn bits(&mut self, len: usize) -> Result<BitBuf> {
        let n_words = len.div_ceil(64);
        let raw = self.take(
            n_words
                .checked_mul(8)
                .ok_or_else(|| Error::MalformedIndex("length overflow".into()))?,
        )?;
        let words = raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(BitBuf::from_words(words, len).expect("word count matches length"))
    }
}

/// Parses a points file. With a grid, coordinates outside it are rejected
/// with the offending line number.
pub fn parse_points(text: &str, grid: Option<GridSpec>) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let [xs, ys] = fields[..] else {
            return Err(Error::Parse {
                line,
                msg: format!("expected two coordinates, found {:?}", body),
            });
        };
        let coord = |s: &str| {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line,
                msg: format!("not a non-negative integer: {s:?}"),
            })
        };
        let (x, y) = (coord(xs)?, coord(ys)?);
        let limit = grid.map_or(1u64 << 32, GridSpec::side);
        if x >= limit || y >= limit {
            return Err(Error::Parse {
                line,
                msg: format!("point ({x}, {y}) outside a grid of side {limit}"),
            });
        }
        out.push(Point::new(x as u32, y as u32));
    }
    Ok(out)
}

pub fn write_points(points: &[Point]) -> String {
    let mut s = String::with_capacity(points.len() * 12);
    for p in points {
        s.push_str(&format!("{} {}\n", p.x, p.y));
    }
    s
}
