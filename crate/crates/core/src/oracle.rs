//! Reference implementations, synthetic data and bound checks.
//!
//! Everything here is written to be obviously correct rather than fast, and
//! works from coordinates instead of Morton labels wherever it can so it
//! stays independent of the code it checks.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builder::{build_quadtree, PointSet, QTree};
use crate::error::{Error, Result};
use crate::hpindex::Rect;
use crate::morton::{morton_value, GridSpec, Point};

/// Linear-scan membership.
pub fn naive_membership(ps: &PointSet, p: Point) -> bool {
    ps.points().contains(&p)
}

/// Linear filter, returned in Morton order.
pub fn naive_range(ps: &PointSet, r: Rect) -> Vec<Point> {
    let mut out: Vec<Point> = ps
        .points()
        .iter()
        .copied()
        .filter(|&p| r.contains(p))
        .collect();
    out.sort_unstable_by_key(|&p| morton_value(p));
    out
}

/// Hash-set membership for bulk checks.
#[derive(Debug, Clone)]
pub struct HashOracle {
    set: HashSet<Point>,
}

impl HashOracle {
    pub fn new(ps: &PointSet) -> Self {
        Self {
            set: ps.points().iter().copied().collect(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.set.contains(&p)
    }
}

/// Node count of the quadtree, by recursive subdivision on coordinates.
pub fn count_quadtree_nodes(ps: &PointSet) -> usize {
    fn count(pts: &[Point], x0: u64, y0: u64, side: u64) -> usize {
        if pts.is_empty() || side == 1 {
            return 1;
        }
        let h = side / 2;
        let mut total = 1;
        for (qx, qy) in [(0, 0), (h, 0), (0, h), (h, h)] {
            let sub: Vec<Point> = pts
                .iter()
                .copied()
                .filter(|p| {
                    let (x, y) = (u64::from(p.x), u64::from(p.y));
                    x >= x0 + qx && x < x0 + qx + h && y >= y0 + qy && y < y0 + qy + h
                })
                .collect();
            total += count(&sub, x0 + qx, y0 + qy, h);
        }
        total
    }
    count(ps.points(), 0, 0, ps.grid().side())
}

/// An axis-aligned square of `side x side` cells with top-left cell
/// `(x0, y0)`. Need not align with quadtree boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Square {
    pub x0: u64,
    pub y0: u64,
    pub side: u64,
}

impl Square {
    pub fn contains(&self, p: Point) -> bool {
        let (x, y) = (u64::from(p.x), u64::from(p.y));
        self.x0 <= x && x < self.x0 + self.side && self.y0 <= y && y < self.y0 + self.side
    }
}

/// Outcome of counting the quadtree ancestors of the points in a square.
#[derive(Debug, Clone, PartialEq)]
pub struct AncestorBoundReport {
    pub square: Square,
    /// Points of the set inside the square.
    pub c_size: usize,
    /// Distinct quadtree nodes on the root-to-leaf paths of those points,
    /// leaves included.
    pub a_size: usize,
    /// `c_size * lg(side) + 4 * lg u`.
    pub bound: f64,
}

impl AncestorBoundReport {
    pub fn holds(&self) -> bool {
        (self.a_size as f64) < self.bound
    }
}

/// Checks `|A| < |C| lg l + 4 lg u` for many squares over one point set.
#[derive(Debug, Clone)]
pub struct AncestorChecker<'a> {
    ps: &'a PointSet,
    qtree: QTree,
}

impl<'a> AncestorChecker<'a> {
    pub fn new(ps: &'a PointSet) -> Self {
        Self {
            ps,
            qtree: build_quadtree(ps),
        }
    }

    pub fn check(&self, square: Square) -> Result<AncestorBoundReport> {
        let grid = self.ps.grid();
        if square.side < 2 {
            return Err(Error::Infeasible(format!(
                "square side {} < 2",
                square.side
            )));
        }
        if square.x0 + square.side > grid.side() || square.y0 + square.side > grid.side() {
            return Err(Error::Infeasible(format!(
                "square at ({}, {}) of side {} leaves the grid",
                square.x0, square.y0, square.side
            )));
        }
        let lg = grid.lg_u();
        let mut ancestors = HashSet::new();
        let mut c_size = 0;
        for &p in self.ps.points().iter().filter(|&&p| square.contains(p)) {
            c_size += 1;
            let mut v = QTree::ROOT;
            ancestors.insert(v);
            for level in (0..lg).rev() {
                let Some(kids) = self.qtree.node(v).children else {
                    break;
                };
                let q = 2 * (p.y >> level & 1) + (p.x >> level & 1);
                v = kids[q as usize];
                ancestors.insert(v);
            }
        }
        Ok(AncestorBoundReport {
            square,
            c_size,
            a_size: ancestors.len(),
            bound: c_size as f64 * (square.side as f64).log2() + 4.0 * f64::from(lg),
        })
    }
}

pub fn check_ancestor_bound(ps: &PointSet, square: Square) -> Result<AncestorBoundReport> {
    AncestorChecker::new(ps).check(square)
}

/// One cluster: `n` distinct cells drawn uniformly from a `diameter`-side
/// square around `center` (a random center when `None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cluster {
    pub n: usize,
    pub diameter: u64,
    pub center: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSpec {
    pub clusters: Vec<Cluster>,
}

impl ClusterSpec {
    /// `c` randomly placed clusters of equal diameter sharing `n` points as
    /// evenly as possible.
    pub fn even(c: usize, n: usize, diameter: u64) -> Self {
        let clusters = (0..c)
            .map(|i| Cluster {
                n: n / c + usize::from(i < n % c),
                diameter,
                center: None,
            })
            .collect();
        Self { clusters }
    }

    pub fn total(&self) -> usize {
        self.clusters.iter().map(|c| c.n).sum()
    }
}

fn cells_as_usize(cells: u64) -> Result<usize> {
    usize::try_from(cells)
        .map_err(|_| Error::Infeasible(format!("{cells} cells exceed the address space")))
}

/// `n` distinct cells drawn uniformly from the grid.
pub fn gen_uniform(n: usize, grid: GridSpec, seed: u64) -> Result<PointSet> {
    let cells = grid.cells();
    if n as u64 > cells {
        return Err(Error::Infeasible(format!(
            "{n} points on a grid of {cells} cells"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = grid.side();
    let picks = index::sample(&mut rng, cells_as_usize(cells)?, n);
    PointSet::new(
        grid,
        picks
            .into_iter()
            .map(|i| Point::new((i as u64 % side) as u32, (i as u64 / side) as u32)),
    )
}

/// The top-left cell of a cluster's square, clamped into the grid.
pub fn cluster_origin(center: Point, diameter: u64, grid: GridSpec) -> (u64, u64) {
    let clamp = |c: u32| {
        u64::from(c)
            .saturating_sub(diameter / 2)
            .min(grid.side() - diameter)
    };
    (clamp(center.x), clamp(center.y))
}

/// Points drawn cluster by cluster. Each cluster contributes `n_i` distinct
/// cells of its own square; clusters may overlap, and cells drawn by more
/// than one cluster appear once in the result.
pub fn gen_clustered(spec: &ClusterSpec, grid: GridSpec, seed: u64) -> Result<PointSet> {
    let side = grid.side();
    for (i, c) in spec.clusters.iter().enumerate() {
        if c.diameter == 0 || c.diameter > side {
            return Err(Error::Infeasible(format!(
                "cluster {i}: diameter {} outside [1, {side}]",
                c.diameter
            )));
        }
        if c.n as u64 > c.diameter * c.diameter {
            return Err(Error::Infeasible(format!(
                "cluster {i}: {} points in a {}x{} square",
                c.n, c.diameter, c.diameter
            )));
        }
        if let Some(center) = c.center {
            grid.check(center)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(spec.total());
    for c in &spec.clusters {
        let center = c.center.unwrap_or_else(|| {
            Point::new(
                rng.random_range(0..side) as u32,
                rng.random_range(0..side) as u32,
            )
        });
        let (x0, y0) = cluster_origin(center, c.diameter, grid);
        let d = c.diameter;
        for i in index::sample(&mut rng, cells_as_usize(d * d)?, c.n) {
            let i = i as u64;
            points.push(Point::new((x0 + i % d) as u32, (y0 + i / d) as u32));
        }
    }
    PointSet::new(grid, points)
}

fn chebyshev(a: Point, b: Point) -> u64 {
    u64::from(a.x.abs_diff(b.x)).max(u64::from(a.y.abs_diff(b.y)))
}

/// Number of points within Chebyshev distance `g` of `p`.
pub fn neighborhood_count(ps: &PointSet, p: Point, g: u64) -> usize {
    ps.points()
        .iter()
        .filter(|&&q| chebyshev(p, q) <= g)
        .count()
}

// Points sorted by (x, y) for windowed scans.
struct ByX(Vec<Point>);

impl ByX {
    fn new(ps: &PointSet) -> Self {
        let mut v = ps.points().to_vec();
        v.sort_unstable();
        Self(v)
    }

    // Slice of points with x in [x - g, x + g].
    fn column_window(&self, x: u32, g: u64) -> &[Point] {
        let lo = u64::from(x).saturating_sub(g);
        let hi = u64::from(x).saturating_add(g);
        let a = self.0.partition_point(|q| u64::from(q.x) < lo);
        let b = self.0.partition_point(|q| u64::from(q.x) <= hi);
        &self.0[a..b]
    }

    fn count_within(&self, p: Point, g: u64) -> usize {
        self.column_window(p.x, g)
            .iter()
            .filter(|&&q| chebyshev(p, q) <= g)
            .count()
    }
}

/// Chebyshev distance from every point to its nearest other point, in the
/// set's canonical order. `None` for a lone point.
pub fn nearest_distances(ps: &PointSet) -> Vec<Option<u64>> {
    let sorted = ByX::new(ps);
    let by_x = &sorted.0;
    ps.points()
        .iter()
        .map(|&p| {
            let k = by_x
                .binary_search(&p)
                .expect("point missing from its own set");
            let mut best: Option<u64> = None;
            let mut consider = |q: Point| {
                let dx = u64::from(q.x.abs_diff(p.x));
                if best.is_some_and(|b| dx > b) {
                    return false;
                }
                let d = chebyshev(p, q);
                best = Some(best.map_or(d, |b| b.min(d)));
                true
            };
            for &q in &by_x[k + 1..] {
                if !consider(q) {
                    break;
                }
            }
            for &q in by_x[..k].iter().rev() {
                if !consider(q) {
                    break;
                }
            }
            best
        })
        .collect()
}

/// The `top_m` most isolated points: largest distance to the nearest other
/// point first; among equal distances, fewer points within twice that
/// distance first, then Morton order.
pub fn isolation_rank(ps: &PointSet, top_m: usize) -> Vec<Point> {
    let pts = ps.points();
    let nn = nearest_distances(ps);
    // (nearest distance, crowding, canonical index)
    let mut keyed: Vec<(u64, usize, usize)> = (0..pts.len())
        .map(|i| (nn[i].unwrap_or(u64::MAX), 0, i))
        .collect();
    keyed.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.2.cmp(&b.2)));
    let cut = top_m.min(keyed.len());
    if cut == 0 {
        return Vec::new();
    }
    // Crowding only matters for the ties that straddle the cut.
    let boundary = keyed[cut - 1].0;
    let tie_start = keyed.partition_point(|k| k.0 > boundary);
    let tie_end = keyed.partition_point(|k| k.0 >= boundary);
    let by_x = ByX::new(ps);
    let ties = &mut keyed[tie_start..tie_end];
    for k in ties.iter_mut() {
        k.1 = by_x.count_within(pts[k.2], k.0.saturating_mul(2));
    }
    ties.sort_unstable_by(|a, b| a.1.cmp(&b.1).then(a.2.cmp(&b.2)));
    keyed[..cut].iter().map(|k| pts[k.2]).collect()
}

/// Cells not in the set, drawn uniformly (with replacement).
pub fn sample_empty(ps: &PointSet, count: usize, seed: u64) -> Result<Vec<Point>> {
    let grid = ps.grid();
    if ps.len() as u64 >= grid.cells() && count > 0 {
        return Err(Error::Infeasible("the grid has no empty cell".into()));
    }
    let oracle = HashOracle::new(ps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = grid.side();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Point::new(
            rng.random_range(0..side) as u32,
            rng.random_range(0..side) as u32,
        );
        if !oracle.contains(p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Filled cells drawn uniformly (with replacement).
pub fn sample_filled(ps: &PointSet, count: usize, seed: u64) -> Result<Vec<Point>> {
    if ps.is_empty() && count > 0 {
        return Err(Error::Infeasible("the set has no filled cell".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| ps.points()[rng.random_range(0..ps.len())])
        .collect())
}
