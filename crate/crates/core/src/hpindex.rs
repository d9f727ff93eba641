//! The heavy-path quadtree index and its queries.
//!
//! Paths are stored by decreasing length, so all paths starting at the same
//! depth have the same length and sit contiguously in `H` with a fixed
//! stride. Two small tables indexed by start depth (first rank, first `H`
//! position) are therefore enough to turn a bit position into
//! (path rank, depth) and back with a little arithmetic.

use crate::bitvec::{BitBuf, BitVector, RankSelect};
use crate::error::{Error, Result};
use crate::morton::{interleave, lcp, GridSpec, Point};
use crate::stats::{SpaceStats, Structure};

/// Half-open cell rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: u64,
    pub y0: u64,
    pub x1: u64,
    pub y1: u64,
}

impl Rect {
    pub fn new(x0: u64, y0: u64, x1: u64, y1: u64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn cell(p: Point) -> Self {
        let (x, y) = (u64::from(p.x), u64::from(p.y));
        Self::new(x, y, x + 1, y + 1)
    }

    pub fn whole(grid: GridSpec) -> Self {
        Self::new(0, 0, grid.side(), grid.side())
    }

    pub fn is_empty(&self) -> bool {
        self.x0 >= self.x1 || self.y0 >= self.y1
    }

    pub fn contains(&self, p: Point) -> bool {
        let (x, y) = (u64::from(p.x), u64::from(p.y));
        self.x0 <= x && x < self.x1 && self.y0 <= y && y < self.y1
    }

    pub fn validate(&self, grid: GridSpec) -> Result<()> {
        let side = grid.side();
        if self.x0 <= self.x1 && self.y0 <= self.y1 && self.x1 <= side && self.y1 <= side {
            Ok(())
        } else {
            Err(Error::InvalidRect {
                x0: self.x0,
                y0: self.y0,
                x1: self.x1,
                y1: self.y1,
                side,
            })
        }
    }

    fn overlaps(&self, x0: u64, y0: u64, side_x: u64, side_y: u64) -> bool {
        x0 < self.x1 && self.x0 < x0 + side_x && y0 < self.y1 && self.y0 < y0 + side_y
    }
}

/// A node of the binarized tree, identified by its bit in `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeRef {
    /// Position in `H`.
    pub pos: usize,
    /// Rank of the heavy path holding the node (0-based).
    pub rank: usize,
    pub depth: u32,
    /// Depth of the top node of the path.
    pub start_depth: u32,
    /// Whether the node is a right child (its bit in `H`).
    pub right: bool,
}

impl NodeRef {
    pub fn offset(&self) -> u32 {
        self.depth - self.start_depth
    }

    pub fn is_top(&self) -> bool {
        self.depth == self.start_depth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Children {
    Leaf,
    One(NodeRef),
    Two { on_path: NodeRef, off_path: NodeRef },
}

impl Children {
    /// Children in left-to-right order.
    pub fn ordered(&self) -> Vec<NodeRef> {
        match *self {
            Children::Leaf => vec![],
            Children::One(c) => vec![c],
            Children::Two { on_path, off_path } if on_path.right => vec![off_path, on_path],
            Children::Two { on_path, off_path } => vec![on_path, off_path],
        }
    }
}

/// What a membership query did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryTrace {
    pub member: bool,
    /// Number of heavy-path initial segments descended.
    pub segments: usize,
    /// Edges matched on each segment, including the edge into the segment's
    /// top node. At the root segment the root itself has no edge.
    pub lcp_lengths: Vec<u32>,
    /// Nodes on the descent, root included.
    pub nodes_visited: usize,
}

/// Succinct heavy-path quadtree over a `B` bitvector backend.
#[derive(Debug, Clone)]
pub struct HPIndex<B = BitVector> {
    grid: GridSpec,
    n: u64,
    h: B,
    levels: Vec<B>,
    paths_starting_at: Vec<u64>,
    // Both indexed by start depth, with one trailing entry for the totals.
    first_rank: Vec<usize>,
    start_pos: Vec<usize>,
}

impl<B: RankSelect> HPIndex<B> {
    /// Assembles an index from raw parts, checking they fit together.
    ///
    /// `paths_starting_at[s]` is the number of heavy paths whose top node is
    /// at depth `s`; `levels[d]` has one bit per path covering depth `d`.
    pub fn from_parts(
        grid: GridSpec,
        paths_starting_at: Vec<u64>,
        h: BitBuf,
        levels: Vec<BitBuf>,
    ) -> Result<Self> {
        let leaf_depth = grid.label_len() as usize;
        let bad = |msg: String| Err(Error::MalformedIndex(msg));
        if paths_starting_at.len() != leaf_depth + 1 {
            return bad(format!(
                "{} path counts for {} start depths",
                paths_starting_at.len(),
                leaf_depth + 1
            ));
        }
        if levels.len() != leaf_depth {
            return bad(format!(
                "{} level bitvectors for leaf depth {leaf_depth}",
                levels.len()
            ));
        }
        let mut first_rank = Vec::with_capacity(leaf_depth + 2);
        let mut start_pos = Vec::with_capacity(leaf_depth + 2);
        let (mut rank, mut pos) = (0usize, 0usize);
        for (s, &count) in paths_starting_at.iter().enumerate() {
            first_rank.push(rank);
            start_pos.push(pos);
            let count = usize::try_from(count)
                .map_err(|_| Error::MalformedIndex("path count overflow".into()))?;
            rank = rank
                .checked_add(count)
                .ok_or_else(|| Error::MalformedIndex("path count overflow".into()))?;
            pos = count
                .checked_mul(leaf_depth + 1 - s)
                .and_then(|b| b.checked_add(pos))
                .ok_or_else(|| Error::MalformedIndex("path count overflow".into()))?;
        }
        first_rank.push(rank);
        start_pos.push(pos);
        let n = rank as u64;
        if h.len() != pos {
            return bad(format!("|H| = {} but path counts imply {pos}", h.len()));
        }
        if n > 0 {
            if paths_starting_at[0] != 1 {
                return bad(format!("{} paths start at the root", paths_starting_at[0]));
            }
            if h.get(0) {
                return bad("root encoded as a right child".into());
            }
        }
        for (d, l) in levels.iter().enumerate() {
            let covering = first_rank[d + 1];
            if l.len() != covering {
                return bad(format!(
                    "|L_{d}| = {} but {covering} paths cover depth {d}",
                    l.len()
                ));
            }
            if l.count_ones() as u64 != paths_starting_at[d + 1] {
                return bad(format!(
                    "L_{d} marks {} branching nodes but {} paths start at depth {}",
                    l.count_ones(),
                    paths_starting_at[d + 1],
                    d + 1
                ));
            }
        }
        Ok(Self {
            grid,
            n,
            h: B::build(h),
            levels: levels.into_iter().map(B::build).collect(),
            paths_starting_at,
            first_rank,
            start_pos,
        })
    }

    /// Assembles an index from `H` and `L_0 ..` written as `0`/`1` strings.
    /// Path counts are implied by the level lengths.
    pub fn from_bit_strings(grid: GridSpec, h: &str, levels: &[&str]) -> Result<Self> {
        let h = BitBuf::from_bit_str(h);
        let levels: Vec<BitBuf> = levels.iter().map(|s| BitBuf::from_bit_str(s)).collect();
        let leaf_depth = grid.label_len() as usize;
        if levels.len() != leaf_depth {
            return Err(Error::MalformedIndex(format!(
                "{} level strings for leaf depth {leaf_depth}",
                levels.len()
            )));
        }
        let n = if h.is_empty() {
            0
        } else {
            1 + levels.iter().map(BitBuf::count_ones).sum::<usize>()
        };
        let mut counts = Vec::with_capacity(leaf_depth + 1);
        let mut covered = 0usize;
        for covering in levels.iter().map(BitBuf::len).chain(std::iter::once(n)) {
            let starting = covering
                .checked_sub(covered)
                .ok_or_else(|| Error::MalformedIndex("level lengths decrease with depth".into()))?;
            counts.push(starting as u64);
            covered = covering;
        }
        Self::from_parts(grid, counts, h, levels)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Number of points.
    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn h(&self) -> &B {
        &self.h
    }

    pub fn levels(&self) -> &[B] {
        &self.levels
    }

    pub fn h_bits(&self) -> BitBuf {
        self.h.to_bit_buf()
    }

    pub fn level_bits(&self) -> Vec<BitBuf> {
        self.levels.iter().map(RankSelect::to_bit_buf).collect()
    }

    pub fn paths_starting_at(&self) -> &[u64] {
        &self.paths_starting_at
    }

    /// Number of paths covering depth `d`, i.e. starting at depth `<= d`.
    pub fn cum_paths(&self, d: u32) -> usize {
        self.first_rank[d as usize + 1]
    }

    /// Number of nodes of the binarized tree.
    pub fn node_count(&self) -> usize {
        self.h.len()
    }

    fn leaf_depth(&self) -> u32 {
        self.grid.label_len()
    }

    fn path_len(&self, start: u32) -> usize {
        (self.leaf_depth() + 1 - start) as usize
    }

    fn node_at(&self, pos: usize, rank: usize, depth: u32, start_depth: u32) -> NodeRef {
        NodeRef {
            pos,
            rank,
            depth,
            start_depth,
            right: self.h.get(pos),
        }
    }

    /// Top node of the `j`-th (0-based) path starting at depth `s`.
    fn path_head(&self, s: u32, j: usize) -> NodeRef {
        let s_ix = s as usize;
        self.node_at(
            self.start_pos[s_ix] + j * self.path_len(s),
            self.first_rank[s_ix] + j,
            s,
            s,
        )
    }

    pub fn root(&self) -> Option<NodeRef> {
        (!self.is_empty()).then(|| self.path_head(0, 0))
    }

    /// Decodes the node whose bit is `H[i]`.
    pub fn locate(&self, i: usize) -> Result<NodeRef> {
        if i >= self.h.len() {
            return Err(Error::NodeOutOfRange {
                pos: i,
                len: self.h.len(),
            });
        }
        // Last start depth whose block begins at or before i; empty blocks
        // share their successor's start and are skipped by this search.
        let s = self.start_pos.partition_point(|&p| p <= i) - 1;
        let within = i - self.start_pos[s];
        let len = self.path_len(s as u32);
        let start = s as u32;
        Ok(self.node_at(
            i,
            self.first_rank[s] + within / len,
            start + (within % len) as u32,
            start,
        ))
    }

    /// The node at `depth` on the path ranked `rank`, if that path covers it.
    pub fn node(&self, rank: usize, depth: u32) -> Option<NodeRef> {
        if rank >= self.n as usize {
            return None;
        }
        let s = self.first_rank.partition_point(|&f| f <= rank) - 1;
        let start = s as u32;
        if depth < start || depth > self.leaf_depth() {
            return None;
        }
        let pos = self.start_pos[s]
            + (rank - self.first_rank[s]) * self.path_len(start)
            + (depth - start) as usize;
        Some(self.node_at(pos, rank, depth, start))
    }

    pub fn is_leaf(&self, v: &NodeRef) -> bool {
        v.depth == self.leaf_depth()
    }

    pub fn has_two_children(&self, v: &NodeRef) -> bool {
        !self.is_leaf(v) && self.levels[v.depth as usize].get(v.rank)
    }

    pub fn children(&self, v: &NodeRef) -> Children {
        if self.is_leaf(v) {
            return Children::Leaf;
        }
        let on_path = self.node_at(v.pos + 1, v.rank, v.depth + 1, v.start_depth);
        let level = &self.levels[v.depth as usize];
        if !level.get(v.rank) {
            return Children::One(on_path);
        }
        // The j-th branching node at depth d parents the j-th path
        // starting at depth d + 1.
        let j = level.rank1(v.rank);
        Children::Two {
            on_path,
            off_path: self.path_head(v.depth + 1, j),
        }
    }

    pub fn parent(&self, v: &NodeRef) -> Option<NodeRef> {
        if v.depth == 0 {
            return None;
        }
        if !v.is_top() {
            return Some(self.node_at(v.pos - 1, v.rank, v.depth - 1, v.start_depth));
        }
        let s = v.start_depth as usize;
        let j = v.rank - self.first_rank[s];
        let parent_rank = self.levels[s - 1].select1(j + 1)?;
        self.node(parent_rank, v.depth - 1)
    }

    /// Membership test following the query label along heavy paths.
    pub fn contains(&self, p: Point) -> Result<bool> {
        self.descend(p, |_| ())
    }

    /// Membership test that also records the heavy-path segments it used.
    pub fn membership(&self, p: Point) -> Result<(bool, QueryTrace)> {
        let mut trace = QueryTrace::default();
        let member = self.descend(p, |m| trace.lcp_lengths.push(m as u32))?;
        trace.member = member;
        trace.segments = trace.lcp_lengths.len();
        trace.nodes_visited = if trace.segments == 0 {
            0
        } else {
            1 + trace.lcp_lengths.iter().map(|&m| m as usize).sum::<usize>()
        };
        Ok((member, trace))
    }

    fn descend(&self, p: Point, mut on_segment: impl FnMut(usize)) -> Result<bool> {
        let label = interleave(p, self.grid)?;
        if self.is_empty() {
            return Ok(false);
        }
        let query = [label.lsb_first()];
        let total = self.leaf_depth() as usize;
        // The root's own bit (H[0]) carries no label information.
        let m = lcp(&self.h, 1, &query[..], 0, total);
        on_segment(m);
        let (mut rank, mut depth) = (0usize, m);
        loop {
            if depth == total {
                return Ok(true);
            }
            let level = &self.levels[depth];
            if !level.get(rank) {
                return Ok(false);
            }
            // The on-path child disagreed with the label, so the off-path
            // child agrees; its own bit needs no comparison.
            let j = level.rank1(rank);
            let s = depth + 1;
            rank = self.first_rank[s] + j;
            let head = self.start_pos[s] + j * (total + 1 - s);
            let m = 1 + lcp(&self.h, head + 1, &query[..], s, total - s);
            on_segment(m);
            depth = s + m - 1;
            debug_assert_eq!(self.h.get(head + m - 1), label.bit(depth as u32 - 1));
        }
    }

    /// All points inside `r`, in Morton order.
    pub fn range_report(&self, r: Rect) -> Result<Vec<Point>> {
        r.validate(self.grid)?;
        self.walk(r, false)
    }

    /// All points, checking that sibling nodes carry opposite bits.
    pub(crate) fn all_points_checked(&self) -> Result<Vec<Point>> {
        self.walk(Rect::whole(self.grid), true)
    }

    fn walk(&self, r: Rect, check: bool) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        let Some(root) = self.root() else {
            return Ok(out);
        };
        if r.is_empty() {
            return Ok(out);
        }
        let lg = self.grid.lg_u();
        // (node, x prefix, y prefix)
        let mut stack = vec![(root, 0u64, 0u64)];
        while let Some((v, xp, yp)) = stack.pop() {
            let d = v.depth;
            let (ybits, xbits) = (d.div_ceil(2), d / 2);
            let (sx, sy) = (1u64 << (lg - xbits), 1u64 << (lg - ybits));
            if !r.overlaps(xp * sx, yp * sy, sx, sy) {
                continue;
            }
            let kids = self.children(&v);
            if let Children::Two { on_path, off_path } = kids {
                if check && on_path.right == off_path.right {
                    return Err(Error::MalformedIndex(format!(
                        "siblings at H[{}] and H[{}] carry the same bit",
                        on_path.pos, off_path.pos
                    )));
                }
            }
            if let Children::Leaf = kids {
                out.push(Point::new(xp as u32, yp as u32));
                continue;
            }
            for c in kids.ordered().into_iter().rev() {
                let b = u64::from(c.right);
                if d % 2 == 0 {
                    stack.push((c, xp, yp << 1 | b));
                } else {
                    stack.push((c, xp << 1 | b, yp));
                }
            }
        }
        Ok(out)
    }

    pub fn space_stats(&self) -> SpaceStats {
        let bits_h = self.h.len();
        let bits_l: usize = self.levels.iter().map(RankSelect::len).sum();
        let aux = self.h.aux_bits()
            + self.levels.iter().map(RankSelect::aux_bits).sum::<usize>()
            + 64 * self.paths_starting_at.len();
        SpaceStats::new(
            Structure::HeavyPath,
            self.n,
            self.grid.lg_u(),
            bits_h,
            Some(bits_h),
            Some(bits_l),
            bits_h + bits_l,
            aux,
        )
    }
}
