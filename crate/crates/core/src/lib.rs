//! Succinct quadtrees for point sets on a `u x u` grid.
//!
//! The quadtree of a point set is binarized, pruned of empty subtrees and cut
//! into heavy paths. Each path is stored as one left/right bit per node in a
//! single bit string `H`, and one bitvector per depth records which path nodes
//! branch. Membership queries follow the query point's Morton label and skip
//! along heavy paths with word-wide longest-common-prefix comparisons, so a
//! query costs one step per heavy path it touches instead of one per edge.
//!
//! A basic k²-tree ([`k2::K2Index`]) and brute-force reference
//! implementations ([`oracle`]) sit beside the main structure for
//! cross-checking and benchmarking.

pub mod bitvec;
pub mod builder;
pub mod error;
pub mod format;
pub mod hpindex;
pub mod k2;
pub mod morton;
pub mod oracle;
pub mod stats;

pub use bitvec::{BitBuf, BitVector, RankSelect};
pub use builder::PointSet;
pub use error::{Error, Result};
pub use hpindex::{HPIndex, NodeRef, QueryTrace, Rect};
pub use k2::K2Index;
pub use morton::{GridSpec, PathLabel, Point};
pub use stats::{SpaceStats, Structure};
