//! Grid coordinates, Morton labels and bit-window prefix comparison.
//!
//! Cells are addressed with `x` growing rightward and `y` growing downward
//! from the top-left cell. At every quadtree level the child index is
//! `2 * y_bit + x_bit`, which orders children top-left, top-right,
//! bottom-left, bottom-right. A cell's root-to-leaf label is therefore the
//! interleaving of its coordinates with the `y` bit first at each level.

use crate::bitvec::BitRead;
use crate::error::{Error, Result};

/// Largest supported number of levels. A full label then fits in one word.
pub const MAX_LG_U: u32 = 31;

/// A `u x u` grid with `u = 2^lg_u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    lg_u: u32,
}

impl GridSpec {
    pub fn new(lg_u: u32) -> Result<Self> {
        if lg_u > MAX_LG_U {
            return Err(Error::GridTooLarge(lg_u));
        }
        Ok(Self { lg_u })
    }

    pub fn lg_u(self) -> u32 {
        self.lg_u
    }

    /// Side length `u`.
    pub fn side(self) -> u64 {
        1u64 << self.lg_u
    }

    /// Number of label bits, also the leaf depth of the binarized tree.
    pub fn label_len(self) -> u32 {
        2 * self.lg_u
    }

    pub fn cells(self) -> u64 {
        self.side() * self.side()
    }

    pub fn contains(self, p: Point) -> bool {
        u64::from(p.x) < self.side() && u64::from(p.y) < self.side()
    }

    pub fn check(self, p: Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                x: p.x.into(),
                y: p.y.into(),
                side: self.side(),
            })
        }
    }
}

/// A grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

/// Root-to-leaf edge labels of a cell, most significant bit first.
///
/// `value` holds the label as an integer whose bit `len - 1` is the first
/// edge, so comparing labels numerically compares them in descent order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathLabel {
    value: u64,
    len: u32,
}

impl PathLabel {
    pub fn from_value(value: u64, len: u32) -> Self {
        debug_assert!(len <= 64 && (len == 64 || value >> len == 0));
        Self { value, len }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn len(self) -> u32 {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Bit at `offset`, counted from the first edge.
    pub fn bit(self, offset: u32) -> bool {
        assert!(offset < self.len);
        self.value >> (self.len - 1 - offset) & 1 == 1
    }

    /// The label as an LSB-first window: bit `k` of the result is edge `k`.
    pub fn lsb_first(self) -> u64 {
        if self.len == 0 {
            0
        } else {
            self.value.reverse_bits() >> (64 - self.len)
        }
    }
}

#[inline]
fn spread(v: u32) -> u64 {
    let mut z = u64::from(v);
    z = (z | z << 16) & 0x0000_FFFF_0000_FFFF;
    z = (z | z << 8) & 0x00FF_00FF_00FF_00FF;
    z = (z | z << 4) & 0x0F0F_0F0F_0F0F_0F0F;
    z = (z | z << 2) & 0x3333_3333_3333_3333;
    (z | z << 1) & 0x5555_5555_5555_5555
}

#[inline]
fn compact(z: u64) -> u32 {
    let mut z = z & 0x5555_5555_5555_5555;
    z = (z | z >> 1) & 0x3333_3333_3333_3333;
    z = (z | z >> 2) & 0x0F0F_0F0F_0F0F_0F0F;
    z = (z | z >> 4) & 0x00FF_00FF_00FF_00FF;
    z = (z | z >> 8) & 0x0000_FFFF_0000_FFFF;
    z = (z | z >> 16) & 0x0000_0000_FFFF_FFFF;
    z as u32
}

/// Morton code with `y` bits in the odd positions, without range checks.
#[inline]
pub(crate) fn morton_value(p: Point) -> u64 {
    spread(p.y) << 1 | spread(p.x)
}

#[inline]
pub(crate) fn point_of_value(v: u64) -> Point {
    Point::new(compact(v), compact(v >> 1))
}

pub fn interleave(p: Point, grid: GridSpec) -> Result<PathLabel> {
    grid.check(p)?;
    Ok(PathLabel::from_value(morton_value(p), grid.label_len()))
}

pub fn deinterleave(label: PathLabel, grid: GridSpec) -> Result<Point> {
    if label.len != grid.label_len() {
        return Err(Error::LabelLength {
            got: label.len,
            expected: grid.label_len(),
        });
    }
    Ok(point_of_value(label.value))
}

/// Length of the longest common prefix of `a[a_off..a_off + max]` and
/// `b[b_off..b_off + max]`, compared a machine word at a time.
pub fn lcp<A, B>(a: &A, a_off: usize, b: &B, b_off: usize, max: usize) -> usize
where
    A: BitRead + ?Sized,
    B: BitRead + ?Sized,
{
    let mut done = 0;
    while done < max {
        let chunk = (max - done).min(64);
        let diff = a.read_bits(a_off + done, chunk) ^ b.read_bits(b_off + done, chunk);
        if diff != 0 {
            return done + diff.trailing_zeros() as usize;
        }
        done += chunk;
    }
    max
}
