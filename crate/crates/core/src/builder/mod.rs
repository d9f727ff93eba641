//! From a point set to the heavy-path encoding, and back.
//!
//! The pipeline is `build_quadtree` → `binarize` → `decompose` →
//! `order_paths` → `encode`. [`build_index`] runs all of it; [`Build`]
//! keeps every intermediate for inspection and testing.

mod bintree;
mod paths;
mod quadtree;

pub use bintree::{binarize, BinNode, BinTree};
pub use paths::{decompose, encode, node_positions, order_paths, HeavyPath, HeavyPaths};
pub use quadtree::{build_quadtree, QNode, QTree};

use crate::bitvec::{BitVector, RankSelect};
use crate::error::Result;
use crate::hpindex::HPIndex;
use crate::morton::{morton_value, point_of_value, GridSpec, Point};

/// A deduplicated set of cells, kept in ascending Morton order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    grid: GridSpec,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(grid: GridSpec, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut labels = Vec::new();
        for p in points {
            grid.check(p)?;
            labels.push(morton_value(p));
        }
        labels.sort_unstable();
        labels.dedup();
        Ok(Self {
            grid,
            points: labels.into_iter().map(point_of_value).collect(),
        })
    }

    pub fn empty(grid: GridSpec) -> Self {
        Self {
            grid,
            points: Vec::new(),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Morton values of the points, ascending.
    pub fn labels(&self) -> impl Iterator<Item = u64> + '_ {
        self.points.iter().map(|&p| morton_value(p))
    }

    pub fn contains(&self, p: Point) -> bool {
        self.grid.contains(p)
            && self
                .points
                .binary_search_by_key(&morton_value(p), |&q| morton_value(q))
                .is_ok()
    }
}

/// Every stage of a build.
#[derive(Debug, Clone)]
pub struct Build<B = BitVector> {
    pub qtree: QTree,
    pub tree: BinTree,
    pub paths: HeavyPaths,
    pub index: HPIndex<B>,
    /// `positions[v]` is the bit of `H` that encodes tree node `v`.
    pub positions: Vec<usize>,
}

impl<B: RankSelect> Build<B> {
    pub fn new(ps: &PointSet) -> Self {
        let qtree = build_quadtree(ps);
        let tree = binarize(&qtree);
        let paths = order_paths(&tree, decompose(&tree));
        let index = encode(&tree, &paths).expect("builder produced an inconsistent encoding");
        let positions = node_positions(&tree, &paths);
        Self {
            qtree,
            tree,
            paths,
            index,
            positions,
        }
    }
}

pub fn build_index(ps: &PointSet) -> HPIndex {
    Build::<BitVector>::new(ps).index
}

/// Recovers the point set an index encodes.
pub fn decode<B: RankSelect>(idx: &HPIndex<B>) -> Result<PointSet> {
    let points = idx.all_points_checked()?;
    PointSet::new(idx.grid(), points)
}
