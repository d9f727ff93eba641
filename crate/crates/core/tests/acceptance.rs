//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hpquad::builder::{decode, Build};
use hpquad::format::StoredIndex;
use hpquad::morton::{deinterleave, interleave};
use hpquad::oracle::{self, AncestorChecker, ClusterSpec, HashOracle, Square};
use hpquad::{BitVector, GridSpec, HPIndex, K2Index, Point, PointSet, Rect, Structure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `H` and `L_0..L_7` of the 14-point example on the 16x16 grid, with the
/// display's spaces and dashes dropped.
const EXAMPLE_H: &str =
    "000000110 10010100 1100010 110111 001001 10010 1010 1000 1110 1110 010 10 1 1";
const EXAMPLE_L: [&str; 8] = [
    "1",
    "10",
    "101",
    "10000",
    "101101",
    "0100000000",
    "01000000000",
    "100000100000",
];

type Outcome = Result<String, String>;

fn grid(lg: u32) -> GridSpec {
    GridSpec::new(lg).unwrap()
}

fn example_index() -> HPIndex {
    HPIndex::from_bit_strings(grid(4), EXAMPLE_H, &EXAMPLE_L)
        .expect("example strings form a valid index")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn example_round_trip() -> Outcome {
    let start = Instant::now();
    let idx = example_index();
    let ps = decode(&idx).map_err(|e| e.to_string())?;
    ensure(ps.len() == 14, || {
        format!("decoded {} points, expected 14", ps.len())
    })?;
    ensure(ps.contains(Point::new(6, 9)), || "(6,9) missing".into())?;
    let rebuilt = Build::<BitVector>::new(&ps).index;
    let h = rebuilt.h_bits().to_bit_string();
    let want_h: String = EXAMPLE_H.chars().filter(|c| !c.is_whitespace()).collect();
    ensure(h == want_h, || format!("H mismatch: {h} vs {want_h}"))?;
    for (d, (got, want)) in rebuilt.level_bits().iter().zip(EXAMPLE_L).enumerate() {
        let got = got.to_bit_string();
        ensure(got == want, || format!("L_{d} mismatch: {got} vs {want}"))?;
    }
    ensure(rebuilt.level_bits().len() == 8, || {
        "wrong number of levels".into()
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "14 points, |H| = {}, H and L_0..L_7 reproduced in {elapsed:?}",
        h.len()
    ))
}

fn worked_trace() -> Outcome {
    let idx = example_index();
    let (member, trace) = idx
        .membership(Point::new(6, 9))
        .map_err(|e| e.to_string())?;
    ensure(member, || "(6,9) reported absent".into())?;
    ensure(trace.lcp_lengths == [0, 6, 2], || {
        format!("lcp {:?}", trace.lcp_lengths)
    })?;
    ensure(trace.segments == 3, || {
        format!("{} segments", trace.segments)
    })?;
    Ok("member, segments = 3, lcp = [0, 6, 2]".into())
}

fn interleave_identity() -> Outcome {
    let l = interleave(Point::new(6, 9), grid(4)).map_err(|e| e.to_string())?;
    ensure(l.value() == 0b1001_0110 && l.len() == 8, || {
        format!("label {:b}", l.value())
    })?;
    let mut checked = 0;
    for lg in 0..=4 {
        let g = grid(lg);
        let side = g.side() as u32;
        let mut seen = vec![false; g.cells() as usize];
        for y in 0..side {
            for x in 0..side {
                let p = Point::new(x, y);
                let l = interleave(p, g).map_err(|e| e.to_string())?;
                let v = l.value() as usize;
                ensure(!seen[v], || format!("label collision at {p:?}"))?;
                seen[v] = true;
                ensure(deinterleave(l, g) == Ok(p), || {
                    format!("round trip failed at {p:?}")
                })?;
                checked += 1;
            }
        }
        ensure(seen.iter().all(|&s| s), || format!("lg_u = {lg}: not onto"))?;
    }
    Ok(format!(
        "(6,9) -> 10010110, bijection on {checked} cells over lg_u <= 4"
    ))
}

/// Results of the randomized suite shared by criteria 4 to 8.
#[derive(Default)]
struct SuiteReport {
    sets: usize,
    hp_membership_mismatches: usize,
    hp_range_mismatches: usize,
    k2_membership_mismatches: usize,
    k2_range_mismatches: usize,
    queries: usize,
    rects: usize,
    segment_violations: usize,
    max_segments_over_bound: f64,
    factor_violations: usize,
    /// Violations on sets that contain an aligned, fully filled 2x2 block.
    factor_violations_with_full_block: usize,
    worst_factor: f64,
    size_violations: usize,
    elapsed: Duration,
}

fn has_full_block(ps: &PointSet) -> bool {
    ps.points().iter().any(|p| {
        let (x, y) = (p.x & !1, p.y & !1);
        [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]
            .iter()
            .all(|&(x, y)| ps.contains(Point::new(x, y)))
    })
}

fn random_suite() -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let lgs = [4u32, 6, 10];
    for i in 0..240 {
        let lg = lgs[i % 3];
        let g = grid(lg);
        let max_n = (g.cells() as usize).min(4096);
        let n = rng.random_range(1..=max_n);
        let seed = rng.random();
        let ps = if (i / 3) % 2 == 0 {
            oracle::gen_uniform(n, g, seed).unwrap()
        } else {
            let c = rng.random_range(1..=16usize);
            let side = g.side();
            // Smallest diameter whose clusters can hold their share.
            let per = n.div_ceil(c) as u64;
            let min_d = (1..=side).find(|d| d * d >= per).unwrap();
            let d = rng.random_range(min_d..=side.min(min_d.max(64)));
            oracle::gen_clustered(&ClusterSpec::even(c, n, d), g, seed).unwrap()
        };
        rep.sets += 1;

        let build = Build::<BitVector>::new(&ps);
        let (qt, t, hp) = (&build.qtree, &build.tree, &build.index);
        let k2 = K2Index::build(&ps);
        let truth = HashOracle::new(&ps);

        let factor = t.node_count() as f64 / qt.node_count() as f64;
        rep.worst_factor = rep.worst_factor.max(factor);
        if 5 * t.node_count() > 7 * qt.node_count() {
            rep.factor_violations += 1;
            rep.factor_violations_with_full_block += usize::from(has_full_block(&ps));
        }
        let l_total: usize = hp.levels().iter().map(hpquad::RankSelect::len).sum();
        if hp.node_count() != t.node_count() || l_total != t.internal_count() {
            rep.size_violations += 1;
        }

        let bound = ps.len().ilog2() as usize + 1;
        let query = |p: Point, rep: &mut SuiteReport| {
            let want = truth.contains(p);
            let (got, trace) = hp.membership(p).unwrap();
            rep.queries += 1;
            rep.hp_membership_mismatches += usize::from(got != want);
            rep.k2_membership_mismatches += usize::from(k2.contains(p).unwrap() != want);
            if trace.segments > bound {
                rep.segment_violations += 1;
            }
            rep.max_segments_over_bound = rep
                .max_segments_over_bound
                .max(trace.segments as f64 / bound as f64);
        };
        let side = g.side();
        if lg <= 6 {
            for y in 0..side as u32 {
                for x in 0..side as u32 {
                    query(Point::new(x, y), &mut rep);
                }
            }
        } else {
            for _ in 0..10_000 {
                let p = Point::new(
                    rng.random_range(0..side) as u32,
                    rng.random_range(0..side) as u32,
                );
                query(p, &mut rep);
            }
            // Filled cells are rare among random cells at this size.
            for &p in ps.points() {
                query(p, &mut rep);
            }
        }
        for _ in 0..60 {
            let (a, b) = (rng.random_range(0..=side), rng.random_range(0..=side));
            let (c, d) = (rng.random_range(0..=side), rng.random_range(0..=side));
            let r = Rect::new(a.min(b), c.min(d), a.max(b), c.max(d));
            let want = oracle::naive_range(&ps, r);
            rep.rects += 1;
            rep.hp_range_mismatches += usize::from(hp.range_report(r).unwrap() != want);
            rep.k2_range_mismatches += usize::from(k2.range_report(r).unwrap() != want);
        }
    }
    rep.elapsed = start.elapsed();
    rep
}

fn oracle_equivalence(rep: &SuiteReport) -> Outcome {
    ensure(rep.sets >= 200, || format!("only {} sets", rep.sets))?;
    ensure(rep.hp_membership_mismatches == 0, || {
        format!("{} membership mismatches", rep.hp_membership_mismatches)
    })?;
    ensure(rep.hp_range_mismatches == 0, || {
        format!("{} range mismatches", rep.hp_range_mismatches)
    })?;
    ensure(rep.elapsed < Duration::from_secs(120), || {
        format!("took {:?}", rep.elapsed)
    })?;
    Ok(format!(
        "{} sets, {} membership queries, {} rects, 0 mismatches, {:?}",
        rep.sets, rep.queries, rep.rects, rep.elapsed
    ))
}

fn three_way(rep: &SuiteReport) -> Outcome {
    ensure(rep.k2_membership_mismatches == 0, || {
        format!("{} k2 membership mismatches", rep.k2_membership_mismatches)
    })?;
    ensure(rep.k2_range_mismatches == 0, || {
        format!("{} k2 range mismatches", rep.k2_range_mismatches)
    })?;
    Ok(format!(
        "k2, hp and oracle agree on {} queries and {} rects",
        rep.queries, rep.rects
    ))
}

fn segment_bound(rep: &SuiteReport) -> Outcome {
    ensure(rep.segment_violations == 0, || {
        format!("{} violations", rep.segment_violations)
    })?;
    Ok(format!(
        "{} queries, max segments / (floor(lg n) + 1) = {:.3}",
        rep.queries, rep.max_segments_over_bound
    ))
}

fn binarization_factor(rep: &SuiteReport) -> Outcome {
    ensure(rep.factor_violations == 0, || {
        format!(
            "{} of {} instances exceed 7/5 (worst |T| / |Q| = {:.4}); {} of them contain a fully filled 2x2 block",
            rep.factor_violations, rep.sets, rep.worst_factor, rep.factor_violations_with_full_block
        )
    })?;
    Ok(format!(
        "{} instances, worst |T| / |Q| = {:.4}",
        rep.sets, rep.worst_factor
    ))
}

fn size_identities(rep: &SuiteReport) -> Outcome {
    ensure(rep.size_violations == 0, || {
        format!("{} violations", rep.size_violations)
    })?;
    Ok(format!(
        "|H| = |T| and sum |L_d| = internal nodes on {} instances",
        rep.sets
    ))
}

fn ancestor_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut squares, mut tightest) = (0usize, 0f64);
    for (seed, lg) in [(1u64, 8u32), (2, 10), (3, 12), (4, 16)] {
        let g = grid(lg);
        let spec = ClusterSpec::even(12, 20_000.min(g.cells() as usize / 8), 1 << (lg / 2 + 1));
        let ps = oracle::gen_clustered(&spec, g, seed).map_err(|e| e.to_string())?;
        let checker = AncestorChecker::new(&ps);
        let mut done = 0;
        while done < 150 {
            let side = 1u64 << rng.random_range(1..lg);
            // Anchor the square near a random point so that C is nonempty.
            let c = ps.points()[rng.random_range(0..ps.len())];
            let x0 = u64::from(c.x)
                .saturating_sub(rng.random_range(0..side))
                .min(g.side() - side);
            let y0 = u64::from(c.y)
                .saturating_sub(rng.random_range(0..side))
                .min(g.side() - side);
            let r = checker
                .check(Square { x0, y0, side })
                .map_err(|e| e.to_string())?;
            if r.c_size == 0 {
                continue;
            }
            ensure(r.holds(), || format!("violated: {r:?}"))?;
            tightest = tightest.max(r.a_size as f64 / r.bound);
            done += 1;
        }
        squares += done;
    }
    ensure(squares >= 500, || format!("only {squares} squares"))?;
    Ok(format!(
        "{squares} squares with C nonempty, max |A| / bound = {tightest:.3}"
    ))
}

fn mean_segments(idx: &HPIndex, pts: &[Point]) -> f64 {
    let total: usize = pts
        .iter()
        .map(|&p| idx.membership(p).unwrap().1.segments)
        .sum();
    total as f64 / pts.len() as f64
}

fn isolation_echo() -> Outcome {
    let g = grid(20);
    let mut lines = Vec::new();
    let mut failed = false;
    for seed in [1u64, 2, 3] {
        let ps = oracle::gen_clustered(&ClusterSpec::even(32, 100_000, 64), g, seed)
            .map_err(|e| e.to_string())?;
        let idx = hpquad::builder::build_index(&ps);
        let isolated = oracle::isolation_rank(&ps, ps.len() / 100);
        let filled = oracle::sample_filled(&ps, 10_000, seed).map_err(|e| e.to_string())?;
        let (iso, fil) = (mean_segments(&idx, &isolated), mean_segments(&idx, &filled));
        let adjacent = oracle::nearest_distances(&ps)
            .iter()
            .filter(|d| **d == Some(1))
            .count();
        let op = if iso <= fil { "<=" } else { ">" };
        failed |= iso > fil;
        lines.push(format!(
            "seed {seed}: {iso:.3} {op} {fil:.3} ({:.2}% of cells have a neighbour at distance 1)",
            100.0 * adjacent as f64 / ps.len() as f64
        ));
    }
    let detail = format!("mean segments isolated vs filled: {}", lines.join(", "));
    if failed {
        Err(detail)
    } else {
        Ok(detail)
    }
}

fn performance_smoke() -> Outcome {
    let g = grid(20);
    let ps = oracle::gen_clustered(&ClusterSpec::even(64, 1_000_000, 256), g, 11)
        .map_err(|e| e.to_string())?;
    let t0 = Instant::now();
    let idx = hpquad::builder::build_index(&ps);
    let build = t0.elapsed();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let side = g.side();
    // Half filled cells, half uniform cells.
    let queries: Vec<Point> = (0..1_000_000)
        .map(|i| {
            if i % 2 == 0 {
                ps.points()[rng.random_range(0..ps.len())]
            } else {
                Point::new(
                    rng.random_range(0..side) as u32,
                    rng.random_range(0..side) as u32,
                )
            }
        })
        .collect();
    let t1 = Instant::now();
    let hits = queries
        .iter()
        .filter(|&&p| idx.contains(p).unwrap())
        .count();
    let elapsed = t1.elapsed();
    ensure(hits >= queries.len() / 2, || format!("only {hits} hits"))?;
    ensure(elapsed <= Duration::from_secs(5), || {
        format!("queries took {elapsed:?}")
    })?;
    Ok(format!(
        "{} points (built in {build:?}), 10^6 queries in {elapsed:?} ({:.0} ns/query)",
        ps.len(),
        elapsed.as_nanos() as f64 / queries.len() as f64
    ))
}

fn determinism() -> Outcome {
    let g = grid(12);
    let ps = oracle::gen_clustered(&ClusterSpec::even(10, 5000, 100), g, 5)
        .map_err(|e| e.to_string())?;
    let copy = PointSet::new(g, ps.points().iter().rev().copied()).map_err(|e| e.to_string())?;
    for s in [Structure::HeavyPath, Structure::K2Tree] {
        let a = StoredIndex::build(&ps, s).to_bytes();
        let b = StoredIndex::build(&copy, s).to_bytes();
        ensure(a == b, || format!("{s} builds differ"))?;
    }
    Ok("hp and k2 index bytes identical across builds".into())
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
        Err(why) => {
            failed += 1;
            println!("criterion {id:>2} FAIL  {name}: {why}");
        }
    };
    report(1, "example round-trip", example_round_trip());
    report(2, "worked trace", worked_trace());
    report(3, "interleave identity", interleave_identity());
    let suite = random_suite();
    report(4, "oracle equivalence", oracle_equivalence(&suite));
    report(5, "three-way agreement", three_way(&suite));
    report(6, "segment bound", segment_bound(&suite));
    report(7, "binarization factor", binarization_factor(&suite));
    report(8, "encoding size identities", size_identities(&suite));
    report(9, "ancestor bound", ancestor_bound());
    report(10, "isolation echo", isolation_echo());
    report(11, "performance smoke", performance_smoke());
    report(12, "determinism", determinism());
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
