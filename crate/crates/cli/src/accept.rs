//! The acceptance suite: ten property checks against exhaustive oracles,
//! each over a fixed family of seeded instances.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use setout_core::constants::{gcso_disjoint_cost_factor, radius, rcto1_cost_factor, rcto_cost_factor, BRUTE_FORCE_CAP, EPS_LP};
use setout_core::cso_disjoint::{set_centers, solve_at_radius, solve_cso_disjoint, DisjointConfig};
use setout_core::cso_general::{center_cap, dense_system, solve_cso, CsoConfig};
use setout_core::gcso::{GcsoConfig, GeoIndex, GeoSystem};
use setout_core::gcso_disjoint::solve_gcso_disjoint_with;
use setout_core::gen::{planted_database, planted_general, planted_geometric, random_general, random_geometric, setcover, PointGen, RelGen};
use setout_core::geo::{cube_partition, wspd_distances, wspd_worst_error, BbdTree, RangeTree};
use setout_core::instance::{euclid, linf, SetSystem};
use setout_core::metric::{brute_force_cso, min_set_cover, setcover_to_cso};
use setout_core::mwu::{mwu_solve, CoverageSystem, MwuConfig, MwuOutcome};
use setout_core::outliers::rcro::{solve_rcro, RcroConfig};
use setout_core::outliers::rcto::{replay_witnesses, solve_rcto, RctoConfig};
use setout_core::outliers::rcto1::{solve_rcto1, Rcto1Config};
use setout_core::outliers::{validate_result_solution, validate_tuple_solution};
use setout_core::relational::oracle::{nested_loop_join, rcro_opt, rcto1_opt, rcto_opt};
use setout_core::relational::{count_rect, linf_kth_distance, sample_rect, yannakakis_count, yannakakis_materialize, Database, Query};
use setout_core::{validate_solution, Bound, GeneralInstance, GeometricInstance, Params, Rect};

/// Cap for the exhaustive tuple-outlier oracles.
const TUPLE_ORACLE_CAP: u64 = 50_000_000;
/// Required share of successful runs for the randomized solvers.
const SUCCESS_RATE: f64 = 0.9;
/// Databases the uniformity test runs on.
const CHI2_RUNS: usize = 20;
const CHI2_DRAWS_PER_CELL: usize = 50;
const CHI2_ALPHA: f64 = 0.001;

#[derive(Clone, Debug)]
pub struct Verdict {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub secs: f64,
}

impl Verdict {
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("[{tag}] {:>2} {:<22} {:>7.2}s  {}", self.id, self.name, self.secs, self.detail)
    }
}

pub const NAMES: [&str; 10] = [
    "general-cso",
    "disjoint-cso",
    "mwu-engine",
    "geometric-indexes",
    "geometric-cso",
    "relational-substrate",
    "result-outliers",
    "first-relation-tuples",
    "any-relation-tuples",
    "setcover-reduction",
];

pub fn run(id: usize) -> Verdict {
    let start = Instant::now();
    let (pass, detail) = match id {
        1 => general_cso(),
        2 => disjoint_cso(),
        3 => mwu_engine(),
        4 => geometric_indexes(),
        5 => geometric_cso(),
        6 => relational_substrate(),
        7 => result_outliers(),
        8 => first_relation_tuples(),
        9 => any_relation_tuples(),
        10 => setcover_reduction(),
        _ => (false, format!("no criterion {id}")),
    };
    let name = NAMES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown");
    Verdict { id, name, pass, detail, secs: start.elapsed().as_secs_f64() }
}

pub fn run_all() -> Vec<Verdict> {
    (1..=NAMES.len()).map(run).collect()
}

/// Problems found on one case; empty when it passed.
type Problems = Vec<String>;

fn expect(p: &mut Problems, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        p.push(what());
    }
}

/// Runs `case` over the seeds in parallel and summarizes the problems.
fn over_seeds<F>(seeds: std::ops::Range<u64>, case: F) -> (usize, Vec<String>)
where
    F: Fn(u64) -> Problems + Sync,
{
    let n = seeds.end.saturating_sub(seeds.start) as usize;
    let probs: Vec<String> = seeds.into_par_iter().flat_map_iter(|s| case(s).into_iter().map(move |m| format!("seed {s}: {m}"))).collect();
    (n, probs)
}

fn summary(cases: usize, probs: &[String]) -> (bool, String) {
    match probs.first() {
        None => (true, format!("{cases} cases")),
        Some(first) => (false, format!("{} problem(s) over {cases} cases; first: {first}", probs.len())),
    }
}

fn small_cso_case(seed: u64, disjoint: bool) -> setout_core::Result<(GeneralInstance, Params)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let m = rng.gen_range(2..=5);
    let n = rng.gen_range(m.max(4)..=12);
    let z = rng.gen_range(1..=2.min(m - 1));
    let k = rng.gen_range(1..=3);
    let f = if disjoint { 1 } else { rng.gen_range(1..=3) };
    let d = rng.gen_range(1..=2);
    let inst = if rng.gen_bool(0.5) {
        planted_general(seed, &PointGen { n, d, k, z, m }, f)?.instance
    } else {
        random_general(seed, n, m, f, d)?
    };
    Ok((inst, Params::new(k, z, EPS_LP)?))
}

fn general_cso() -> (bool, String) {
    let start = Instant::now();
    let (cases, mut probs) = over_seeds(0..200, |seed| {
        let mut p = Problems::new();
        let (inst, par) = match small_cso_case(seed, false) {
            Ok(c) => c,
            Err(e) => return vec![format!("generator: {e}")],
        };
        let run = match solve_cso(&inst, &par, &CsoConfig::default()) {
            Ok(r) => r,
            Err(e) => return vec![format!("solver: {e}")],
        };
        let opt = match brute_force_cso(&inst, par.k, par.z, BRUTE_FORCE_CAP) {
            Ok((o, _)) => o,
            Err(e) => return vec![format!("oracle: {e}")],
        };
        let f = inst.frequency();
        let cap = center_cap(par.k, EPS_LP);
        let rep = match validate_solution(&inst, &run.solution, &par, (cap / par.k as f64, (2 * f) as f64, 2.0)) {
            Ok(r) => r,
            Err(e) => return vec![format!("invalid output: {e}")],
        };
        expect(&mut p, rep.valid(), || format!("solution fails validation: {rep:?}"));
        expect(&mut p, rep.radius <= 2.0 * opt, || format!("radius {} > 2 * opt {opt}", rep.radius));
        expect(&mut p, rep.num_outliers <= 2 * f * par.z, || format!("{} outlier sets > 2fz = {}", rep.num_outliers, 2 * f * par.z));
        expect(&mut p, rep.num_centers as f64 <= cap, || format!("{} centers > {cap}", rep.num_centers));
        p
    });
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        probs.push(format!("took {secs:.1}s, budget 60s"));
    }
    summary(cases, &probs)
}

fn disjoint_cso() -> (bool, String) {
    let cfg = DisjointConfig::default();
    let (cases, probs) = over_seeds(0..200, |seed| {
        let mut p = Problems::new();
        let (inst, par) = match small_cso_case(seed, true) {
            Ok(c) => c,
            Err(e) => return vec![format!("generator: {e}")],
        };
        let run = match solve_cso_disjoint(&inst, &par, &cfg) {
            Ok(r) => r,
            Err(e) => return vec![format!("solver: {e}")],
        };
        let opt = match brute_force_cso(&inst, par.k, par.z, BRUTE_FORCE_CAP) {
            Ok((o, _)) => o,
            Err(e) => return vec![format!("oracle: {e}")],
        };
        let cap = center_cap(par.k, EPS_LP);
        let rep = match validate_solution(&inst, &run.solution, &par, (cap / par.k as f64, 2.0, radius::DISJOINT_COST)) {
            Ok(r) => r,
            Err(e) => return vec![format!("invalid output: {e}")],
        };
        expect(&mut p, rep.valid(), || format!("solution fails validation: {rep:?}"));
        expect(&mut p, rep.radius <= radius::DISJOINT_COST * opt, || format!("radius {} > 30 * opt {opt}", rep.radius));
        expect(&mut p, rep.num_outliers <= 2 * par.z, || format!("{} outlier sets > 2z", rep.num_outliers));
        expect(&mut p, rep.num_centers as f64 <= cap, || format!("{} centers > {cap}", rep.num_centers));
        // The coreset at every feasible guess must admit a solution within DENSE r.
        let centers = set_centers(&inst, par.k);
        for probe in run.probes.iter().filter(|pr| pr.feasible) {
            let r = probe.value;
            let Ok((state, _)) = solve_at_radius(&inst, &centers, r, &par, &cfg.lp) else {
                p.push(format!("feasible guess {r} not reproducible"));
                continue;
            };
            let Some((core, kp, zb)) = state.to_instance(&inst) else { continue };
            match brute_force_cso(&core, kp, zb, BRUTE_FORCE_CAP) {
                Ok((copt, _)) => {
                    expect(&mut p, copt <= radius::DENSE * r, || format!("coreset optimum {copt} > 10 r at r = {r} (opt {opt})"))
                }
                Err(e) => p.push(format!("coreset oracle: {e}")),
            }
        }
        p
    });
    summary(cases, &probs)
}

/// The iteration budget the engine promises, floored at one round.
fn stated_budget(n: usize, k: usize, z: usize, eps: f64) -> usize {
    ((8.0 * (k + z) as f64 * (n as f64).ln() / (eps * eps)).ceil() as usize).max(1)
}

/// Iterate counts behind an averaged vector, if it is one.
fn counts(v: &[f64], t: usize) -> Option<Vec<u64>> {
    let tf = t as f64;
    v.iter()
        .map(|&a| {
            let c = (a * tf).round();
            ((a * tf - c).abs() <= 1e-9 * tf.max(1.0) && c >= 0.0).then_some(c as u64)
        })
        .collect()
}

/// Checks one accepted vector. `rows` maps iterate counts to the integer
/// row sums `T A_i psi`, computed without the engine, so coverage is
/// compared against `1 - eps` in exact arithmetic.
#[allow(clippy::too_many_arguments)]
fn check_mwu_solution<R>(p: &mut Problems, what: &str, x: &[f64], y: &[f64], t: usize, rows: R, n: usize, k: usize, z: usize, eps: f64)
where
    R: Fn(&[u64], &[u64]) -> Vec<u64>,
{
    let b = stated_budget(n, k, z, eps);
    expect(p, t <= b, || format!("{what}: {t} iterations > budget {b}"));
    if t == 0 {
        return;
    }
    let (Some(xc), Some(yc)) = (counts(x, t), counts(y, t)) else {
        p.push(format!("{what}: not an average of {t} iterates"));
        return;
    };
    let xs: u64 = xc.iter().sum();
    let ys: u64 = yc.iter().sum();
    expect(p, xs == (k.min(x.len()) * t) as u64, || format!("{what}: x mass {xs} over {t} rounds"));
    expect(p, ys == (z.min(y.len()) * t) as u64, || format!("{what}: y mass {ys} over {t} rounds"));
    let worst = rows(&xc, &yc).into_iter().min().unwrap_or(u64::MAX);
    let need = (BigRational::one() - BigRational::from_float(eps).expect("finite eps")) * BigRational::from_integer(BigInt::from(t));
    expect(p, BigRational::from_integer(BigInt::from(worst)) >= need, || {
        format!("{what}: coverage {worst}/{t} = {} < 1 - eps", worst as f64 / t as f64)
    });
}

fn mwu_engine() -> (bool, String) {
    let eps = 0.05;
    let cfg = MwuConfig::default();
    let (c1, mut probs) = over_seeds(0..60, |seed| {
        let mut p = Problems::new();
        let Ok((inst, par)) = small_cso_case(seed, false) else { return vec!["generator failed".into()] };
        let elems: Vec<usize> = (0..inst.len()).collect();
        let sets: Vec<usize> = (0..inst.num_sets()).collect();
        for r in setout_core::metric::enumerate_radii(&inst).values {
            let mut sys = dense_system(&inst, &elems, &sets, r);
            if let MwuOutcome::Feasible(s) = mwu_solve(&mut sys, par.k, par.z, eps, &cfg) {
                let rows = |xc: &[u64], yc: &[u64]| -> Vec<u64> {
                    (0..inst.len())
                        .map(|i| {
                            let balls: u64 = (0..inst.len()).filter(|&l| inst.dist(i, l) <= r).map(|l| xc[l]).sum();
                            balls + inst.sets_of(i).iter().map(|&j| yc[j]).sum::<u64>()
                        })
                        .collect()
                };
                check_mwu_solution(&mut p, &format!("r = {r}"), &s.x, &s.y, s.iterations, rows, inst.len(), par.k, par.z, eps);
            }
        }
        p
    });
    let geps = 0.2;
    let (c2, gprobs) = over_seeds(1000..1030, |seed| {
        let mut p = Problems::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, k, z) = (rng.gen_range(1..=3), rng.gen_range(1..=2), rng.gen_range(1..=2));
        let g = PointGen { n: rng.gen_range(10..=40), d, k, z, m: rng.gen_range(3..=6) };
        let Ok(pl) = planted_geometric(seed, &g, false) else { return vec!["generator failed".into()] };
        let inst = pl.instance;
        let Ok(ix) = GeoIndex::build(inst.points(), inst.rects()) else { return vec!["index build failed".into()] };
        let radii = wspd_distances(inst.points(), geps / 8.0).values;
        let step = (radii.len() / 8).max(1);
        for &r in radii.iter().step_by(step) {
            let mut sys = GeoSystem::new(&ix, r, geps / 8.0);
            if let MwuOutcome::Feasible(s) = mwu_solve(&mut sys, k, z, geps, &cfg) {
                let dense = sys.to_dense();
                let rows = |xc: &[u64], yc: &[u64]| -> Vec<u64> {
                    dense.balls.iter().zip(&dense.member).map(|(b, m)| b.iter().map(|&l| xc[l]).sum::<u64>() + m.iter().map(|&j| yc[j]).sum::<u64>()).collect()
                };
                check_mwu_solution(&mut p, &format!("tree system r = {r}"), &s.x, &s.y, s.iterations, rows, inst.len(), k, z, geps);
            }
        }
        p
    });
    probs.extend(gprobs);
    summary(c1 + c2, &probs)
}

fn grid_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(0..=40) as f64 * 0.5).collect()).collect()
}

fn random_rect(rng: &mut ChaCha8Rng, d: usize) -> Rect {
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    for _ in 0..d {
        let a = rng.gen_range(0..=40) as f64 * 0.5;
        let b = rng.gen_range(0..=40) as f64 * 0.5;
        lo.push(if rng.gen_bool(0.1) { Bound::NegInf } else { Bound::Finite(a.min(b)) });
        hi.push(if rng.gen_bool(0.1) { Bound::PosInf } else { Bound::Finite(a.max(b)) });
    }
    Rect::new(lo, hi)
}

fn geometric_indexes() -> (bool, String) {
    let start = Instant::now();
    let mut probs = Vec::new();
    // Ball queries: 25 trees, 20 queries each.
    let (c1, p1) = over_seeds(0..25, |seed| {
        let mut p = Problems::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(50..=300);
        let pts = grid_points(&mut rng, n, d);
        let tree = BbdTree::build(&pts);
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..21.0)).collect();
            let r = if rng.gen_bool(0.5) { euclid(&x, &pts[rng.gen_range(0..pts.len())]) } else { rng.gen_range(0.0..8.0) };
            let eps = *[0.05, 0.2, 0.5].choose(&mut rng).unwrap();
            let got = tree.collect(&tree.ball_query(&x, r, eps));
            let mut dedup = got.clone();
            dedup.dedup();
            let inner = tree.scan(&x, r);
            let outer = tree.scan(&x, (1.0 + eps) * r);
            expect(&mut p, dedup.len() == got.len(), || "canonical nodes overlap".into());
            expect(&mut p, inner.iter().all(|i| got.binary_search(i).is_ok()), || format!("ball query misses a point within r = {r}"));
            expect(&mut p, got.iter().all(|i| outer.binary_search(i).is_ok()), || format!("ball query reports a point beyond (1+eps) r, r = {r}"));
        }
        p
    });
    probs.extend(p1);
    // Range counts: 25 trees, 20 rectangles each.
    let (c2, p2) = over_seeds(100..125, |seed| {
        let mut p = Problems::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(20..=300);
        let pts = grid_points(&mut rng, n, d);
        let tree = RangeTree::build(&pts);
        for _ in 0..20 {
            let rect = random_rect(&mut rng, d);
            let scan: Vec<usize> = (0..pts.len()).filter(|&i| rect.contains(&pts[i])).collect();
            match (tree.count(&rect), tree.report(&rect)) {
                (Ok(c), Ok(rep)) => {
                    expect(&mut p, c == scan.len(), || format!("count {c} != scan {}", scan.len()));
                    expect(&mut p, rep == scan, || "reported points differ from scan".into());
                }
                _ => p.push("range query refused a well-ordered rectangle".into()),
            }
        }
        p
    });
    probs.extend(p2);
    // Distance lists.
    let (c3, p3) = over_seeds(200..208, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3);
        let pts: Vec<Vec<f64>> = (0..60).map(|_| (0..d).map(|_| rng.gen_range(0.0..100.0)).collect()).collect();
        let mut p = Problems::new();
        for eps in [0.05, 0.2] {
            let worst = wspd_worst_error(&pts, &wspd_distances(&pts, eps).values);
            expect(&mut p, worst <= eps, || format!("distance list error {worst} > {eps}"));
        }
        p
    });
    probs.extend(p3);
    // Complement partitions: 10 box families, 10,000 points each.
    let (c4, p4) = over_seeds(300..310, |seed| {
        let mut p = Problems::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3);
        let boxes: Vec<Rect> = (0..rng.gen_range(1..=5))
            .map(|_| {
                let c: Vec<f64> = (0..d).map(|_| rng.gen_range(0..=20) as f64 * 0.5).collect();
                Rect::cube(&c, rng.gen_range(0..=6) as f64 * 0.5)
            })
            .collect();
        let (free, covered) = cube_partition(&boxes);
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-4..=28) as f64 * 0.5).collect();
            let nf = free.iter().filter(|c| c.contains(&x)).count();
            let nc = covered.iter().filter(|c| c.contains(&x)).count();
            let outside = !boxes.iter().any(|b| b.contains(&x));
            expect(&mut p, nf + nc == 1, || format!("{x:?} lies in {} cells", nf + nc));
            expect(&mut p, (nf == 1) == outside, || format!("{x:?} misclassified"));
        }
        p
    });
    probs.extend(p4);
    let secs = start.elapsed().as_secs_f64();
    if secs >= 30.0 {
        probs.push(format!("took {secs:.1}s, budget 30s"));
    }
    summary(c1 * 20 + c2 * 20 + c3 * 2 + c4 * 10_000, &probs)
}

fn dyadic(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0..1024) as f64 / 1024.0).collect()
}

fn geometric_cso() -> (bool, String) {
    let cfg = GcsoConfig::default();
    let (cases, probs) = over_seeds(0..60, |seed| {
        let mut p = Problems::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e0);
        let d = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=2);
        let z = rng.gen_range(1..=2);
        let m = rng.gen_range(3..=8);
        let n = rng.gen_range(10..=60);
        let eps = *[0.1, 0.2, 0.5].choose(&mut rng).unwrap();
        let par = Params::new(k, z, eps).unwrap();
        let g = PointGen { n, d, k, z, m };
        let inst: GeometricInstance = match if rng.gen_bool(0.5) { planted_geometric(seed, &g, false).map(|p| p.instance) } else { random_geometric(seed, n, m, d) } {
            Ok(i) => i,
            Err(e) => return vec![format!("generator: {e}")],
        };
        let Ok((opt, _)) = brute_force_cso(&inst, k, z, BRUTE_FORCE_CAP) else { return vec!["oracle refused".into()] };
        match setout_core::gcso::solve_gcso(&inst, &par, &cfg) {
            Ok(run) => {
                let f = inst.frequency();
                let c = (2.0 + eps) * (1.0 + eps).powi(2);
                let rep = validate_solution(&inst, &run.solution, &par, (2.0 + eps, (2 * f) as f64, c)).unwrap();
                expect(&mut p, rep.valid(), || format!("gcso output fails validation: {rep:?}"));
                expect(&mut p, rep.radius <= c * opt, || format!("gcso radius {} > {c} * opt {opt}", rep.radius));
                expect(&mut p, rep.num_outliers <= 2 * f * z, || format!("gcso {} rectangles > 2fz", rep.num_outliers));
                expect(&mut p, rep.num_centers as f64 <= (2.0 + eps) * k as f64, || format!("gcso {} centers > (2+eps)k", rep.num_centers));
            }
            Err(e) => p.push(format!("gcso: {e}")),
        }
        // Tree-backed and explicit systems agree on dyadic weights.
        if let Ok(ix) = GeoIndex::build(inst.points(), inst.rects()) {
            let radii = wspd_distances(inst.points(), eps / 8.0).values;
            for _ in 0..3 {
                let r = radii[rng.gen_range(0..radii.len())];
                let mut t = GeoSystem::new(&ix, r, eps / 8.0);
                let mut dn = t.to_dense();
                let sigma = dyadic(&mut rng, n);
                expect(&mut p, t.coefficients(&sigma) == dn.coefficients(&sigma), || format!("coefficients differ at r = {r}"));
                let (x, y) = (dyadic(&mut rng, n), dyadic(&mut rng, m));
                expect(&mut p, t.row_values_frac(&x, &y) == dn.row_values_frac(&x, &y), || format!("row values differ at r = {r}"));
            }
        }
        // The disjoint solver on slab instances.
        let pd = match planted_geometric(seed, &g, true) {
            Ok(pl) => pl.instance,
            Err(e) => return {
                p.push(format!("slab generator: {e}"));
                p
            },
        };
        let Ok((dopt, _)) = brute_force_cso(&pd, k, z, BRUTE_FORCE_CAP) else { return vec!["oracle refused".into()] };
        match solve_gcso_disjoint_with(&pd, &par, &cfg, true) {
            Ok(run) => {
                let c = gcso_disjoint_cost_factor(eps);
                let claim = run.solution.claim;
                let rep = validate_solution(&pd, &run.solution, &par, (claim.centers, 2.0, c)).unwrap();
                expect(&mut p, rep.valid(), || format!("disjoint output fails validation: {rep:?}"));
                expect(&mut p, rep.radius <= c * dopt, || format!("disjoint radius {} > {c} * opt {dopt}", rep.radius));
            }
            Err(e) => p.push(format!("gcso-disjoint: {e}")),
        }
        p
    });
    summary(cases, &probs)
}

fn rel_params(rng: &mut ChaCha8Rng) -> RelGen {
    let g = rng.gen_range(2..=4);
    RelGen {
        g,
        d: rng.gen_range(g..=g + 2),
        rows: rng.gen_range(2..=6),
        clusters: rng.gen_range(1..=3),
        bad: rng.gen_range(0..=2),
        bad_rel: rng.gen_range(0..g),
    }
}

fn sorted_rows(mut v: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    v.sort_unstable();
    v
}

fn relational_substrate() -> (bool, String) {
    let chi_runs = std::sync::atomic::AtomicUsize::new(0);
    let (cases, probs) = over_seeds(0..100, |seed| {
        let mut p = Problems::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3e1);
        let db: Database = match planted_database(seed, &rel_params(&mut rng)) {
            Ok(pl) => pl.instance,
            Err(e) => return vec![format!("generator: {e}")],
        };
        expect(&mut p, db.size() <= 60, || format!("database has {} tuples", db.size()));
        let q = match Query::new(&db) {
            Ok(q) => q,
            Err(e) => return vec![format!("query: {e}")],
        };
        let nested = nested_loop_join(&db, &db.full_mask());
        let total = yannakakis_count(&q);
        expect(&mut p, total == nested.len() as u128, || format!("count {total} != nested loop {}", nested.len()));
        let Ok(mat) = yannakakis_materialize(&q, 1 << 20) else { return vec!["materialize refused".into()] };
        expect(&mut p, sorted_rows(mat.iter().map(|r| r.rows.clone()).collect()) == sorted_rows(nested.iter().map(|r| r.rows.clone()).collect()), || {
            "materialized results differ from nested loop".into()
        });
        if mat.is_empty() {
            return p;
        }
        // Counting is additive over a partition of space.
        let d = q.dim();
        let boxes: Vec<Rect> = (0..rng.gen_range(1..=3))
            .map(|_| Rect::cube(&mat[rng.gen_range(0..mat.len())].point, *[0.0, 1.0, 2.5, 10.0].choose(&mut rng).unwrap()))
            .collect();
        let (free, covered) = cube_partition(&boxes);
        let mut sum = 0u128;
        for cell in free.iter().chain(&covered) {
            let c = count_rect(&q, cell);
            let want = nested.iter().filter(|r| cell.contains(&r.point)).count() as u128;
            expect(&mut p, c == want, || format!("cell count {c} != {want}"));
            sum += c;
        }
        expect(&mut p, sum == total, || format!("cell counts sum to {sum}, join has {total}"));
        // Uniform sampling inside the busiest covered cell, or the whole space.
        let rect = covered.iter().max_by_key(|c| count_rect(&q, c)).filter(|c| count_rect(&q, c) >= 2).cloned().unwrap_or_else(|| Rect::full(d));
        let inside: Vec<Vec<usize>> = sorted_rows(nested.iter().filter(|r| rect.contains(&r.point)).map(|r| r.rows.clone()).collect());
        if (2..=200).contains(&inside.len()) && chi_runs.fetch_add(1, std::sync::atomic::Ordering::SeqCst) < CHI2_RUNS {
            let draws = CHI2_DRAWS_PER_CELL * inside.len();
            match sample_rect(&q, &rect, draws, &mut rng) {
                Ok(s) => {
                    let mut hits = vec![0usize; inside.len()];
                    for r in s {
                        match inside.binary_search(&r.rows) {
                            Ok(i) => hits[i] += 1,
                            Err(_) => p.push("sample outside the rectangle".into()),
                        }
                    }
                    let e = draws as f64 / inside.len() as f64;
                    let stat: f64 = hits.iter().map(|&h| (h as f64 - e).powi(2) / e).sum();
                    let pval = 1.0 - ChiSquared::new((inside.len() - 1) as f64).unwrap().cdf(stat);
                    expect(&mut p, pval > CHI2_ALPHA, || format!("uniformity p = {pval:.2e} over {} cells", inside.len()));
                }
                Err(e) => p.push(format!("sampling: {e}")),
            }
        }
        // Rank selection against all pairs.
        if (2..=200).contains(&mat.len()) {
            let mut all: Vec<f64> = Vec::new();
            for i in 0..mat.len() {
                for j in i + 1..mat.len() {
                    all.push(linf(&mat[i].point, &mat[j].point));
                }
            }
            all.sort_by(f64::total_cmp);
            let pairs = all.len();
            let ranks: Vec<usize> = if pairs <= 200 {
                (1..=pairs).collect()
            } else {
                let mut r: Vec<usize> = (0..30).map(|_| rng.gen_range(1..=pairs)).collect();
                r.extend([1, pairs]);
                r
            };
            for ell in ranks {
                match linf_kth_distance(&q, ell as u128) {
                    Ok(v) => expect(&mut p, v == all[ell - 1], || format!("rank {ell}: {v} != {}", all[ell - 1])),
                    Err(e) => p.push(format!("rank {ell}: {e}")),
                }
            }
        }
        p
    });
    let ran = chi_runs.into_inner().min(CHI2_RUNS);
    let (pass, detail) = summary(cases, &probs);
    (pass && ran > 0, format!("{detail}, {ran} uniformity tests"))
}

/// A database whose join has between `lo` and `hi` results.
fn sized_database(seed: u64, lo: u128, hi: u128, mut params: impl FnMut(&mut ChaCha8Rng) -> RelGen) -> Option<Database> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..500).find_map(|attempt| {
        let db = planted_database(seed * 1000 + attempt, &params(&mut rng)).ok()?.instance;
        let n = yannakakis_count(&Query::new(&db).ok()?);
        (lo..=hi).contains(&n).then_some(db)
    })
}

fn result_outliers() -> (bool, String) {
    let cfg = RcroConfig { direct_factor: 0.0, ..RcroConfig::default() };
    let runs: Vec<Result<bool, String>> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let db = sized_database(seed, 20, 40, |rng| {
                let g = 2;
                RelGen { g, d: rng.gen_range(2..=3), rows: rng.gen_range(8..=24), clusters: rng.gen_range(1..=3), bad: rng.gen_range(0..=2), bad_rel: rng.gen_range(0..g) }
            })
            .ok_or("no database of the requested size")?;
            let q = Query::new(&db).map_err(|e| e.to_string())?;
            let n = yannakakis_count(&q) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7c0);
            let z = rng.gen_range((n as f64 * 0.05).ceil() as usize..=(n as f64 * 0.25).floor() as usize);
            let k = rng.gen_range(1..=2);
            let par = Params::new(k, z, 0.2).map_err(|e| e.to_string())?;
            let run = solve_rcro(&q, &par, seed, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
            let opt = rcro_opt(&q, k, z, TUPLE_ORACLE_CAP).map_err(|e| e.to_string())?;
            let rep = validate_result_solution(&q, &run.centers, &run.outliers);
            if !rep.valid() {
                return Err(format!("seed {seed}: invalid output {rep:?}"));
            }
            if !run.sampled {
                return Err(format!("seed {seed}: sampling path not taken"));
            }
            let bound = (1.0 + par.eps) * (z as f64 / n as f64) * run.tau as f64;
            if run.remaining as f64 > bound {
                return Err(format!("seed {seed}: {} sample points left > (1+eps) delta tau = {bound}", run.remaining));
            }
            Ok(rep.radius <= (3.0 + par.eps) * opt && run.outliers.len() as f64 <= (1.0 + par.eps).powi(2) * z as f64)
        })
        .collect();
    rate_verdict(runs)
}

fn rate_verdict(runs: Vec<Result<bool, String>>) -> (bool, String) {
    let total = runs.len();
    let errors: Vec<&String> = runs.iter().filter_map(|r| r.as_ref().err()).collect();
    let ok = runs.iter().filter(|r| matches!(r, Ok(true))).count();
    let rate = ok as f64 / total as f64;
    let pass = errors.is_empty() && rate >= SUCCESS_RATE;
    let mut detail = format!("{ok}/{total} runs within bounds ({:.0}%)", 100.0 * rate);
    if let Some(e) = errors.first() {
        detail.push_str(&format!("; {} hard failure(s), first: {e}", errors.len()));
    }
    (pass, detail)
}

fn first_relation_tuples() -> (bool, String) {
    let (cases, probs) = over_seeds(0..40, |seed| {
        let mut p = Problems::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1e1);
        let g = rng.gen_range(2..=3);
        let gp = RelGen { g, d: rng.gen_range(g..=g + 1), rows: rng.gen_range(2..=4), clusters: rng.gen_range(1..=2), bad: rng.gen_range(0..=2), bad_rel: 0 };
        let Ok(pl) = planted_database(seed, &gp) else { return vec!["generator failed".into()] };
        let db = pl.instance;
        if db.size() > 30 || db.relation(0).rows.len() > 6 {
            return vec![format!("database outside the harness ({} tuples)", db.size())];
        }
        let Ok(q) = Query::new(&db) else { return vec!["query failed".into()] };
        let (k, z) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let par = Params::new(k, z, 0.2).unwrap();
        let run = match solve_rcto1(&q, &par, &Rcto1Config::default()) {
            Ok(r) => r,
            Err(e) => return vec![format!("solver: {e}")],
        };
        let opt = match rcto1_opt(&q, k, z, TUPLE_ORACLE_CAP) {
            Ok((o, _)) => o,
            Err(e) => return vec![format!("oracle: {e}")],
        };
        let s = &run.solution;
        let rep = validate_tuple_solution(&q, &s.centers, &s.outliers);
        let c = rcto1_cost_factor(par.eps, q.dim());
        expect(&mut p, rep.centers_valid, || "a center is not a remaining join result".into());
        expect(&mut p, rep.num_centers as f64 <= run.claim.centers * k as f64, || format!("{} centers over the claim", rep.num_centers));
        expect(&mut p, rep.num_outliers <= 2 * z, || format!("{} tuples > 2z", rep.num_outliers));
        expect(&mut p, s.outliers.iter().all(|t| t.rel == 0), || "a discarded tuple is outside the first relation".into());
        expect(&mut p, rep.radius <= c * opt, || format!("radius {} > {c:.2} * opt {opt}", rep.radius));
        p
    });
    summary(cases, &probs)
}

fn any_relation_tuples() -> (bool, String) {
    let replay_failures = std::sync::atomic::AtomicUsize::new(0);
    let runs: Vec<Result<bool, String>> = (0..30u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf97);
            let gp = RelGen { g: 2, d: rng.gen_range(2..=3), rows: rng.gen_range(3..=8), clusters: rng.gen_range(1..=2), bad: rng.gen_range(0..=2), bad_rel: rng.gen_range(0..2) };
            let db = planted_database(seed, &gp).map_err(|e| e.to_string())?.instance;
            if db.size() > 24 {
                return Err(format!("seed {seed}: database has {} tuples", db.size()));
            }
            let q = Query::new(&db).map_err(|e| e.to_string())?;
            let (k, z) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
            let par = Params::new(k, z, 0.2).unwrap();
            let run = solve_rcto(&q, &par, seed, &RctoConfig::default()).map_err(|e| format!("seed {seed}: {e}"))?;
            if !run.trials.iter().all(replay_witnesses) {
                replay_failures.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                return Err(format!("seed {seed}: witness replay failed"));
            }
            let (opt, _) = rcto_opt(&q, k, z, TUPLE_ORACLE_CAP).map_err(|e| e.to_string())?;
            let s = &run.solution;
            let rep = validate_tuple_solution(&q, &s.centers, &s.outliers);
            let g = db.relations().len();
            Ok(rep.centers_valid && rep.radius <= rcto_cost_factor(q.dim()) * opt && rep.num_outliers <= g * z && rep.num_centers <= k)
        })
        .collect();
    let (pass, detail) = rate_verdict(runs);
    let bad = replay_failures.into_inner();
    (pass && bad == 0, format!("{detail}; witness replay failed on {bad} run(s)"))
}

fn setcover_reduction() -> (bool, String) {
    let (cases, probs) = over_seeds(0..20, |seed| {
        let mut p = Problems::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5c);
        let nx = rng.gen_range(2..=6);
        let sets = match setcover(seed, nx, rng.gen_range(2..=5)) {
            Ok(s) => s,
            Err(e) => return vec![format!("generator: {e}")],
        };
        let c = min_set_cover(nx, &sets);
        let k = rng.gen_range(1..=nx);
        let inst = match setcover_to_cso(nx, &sets, k) {
            Ok(i) => i,
            Err(e) => return vec![format!("reduction: {e}")],
        };
        match Params::new(k, c, EPS_LP).and_then(|par| solve_cso(&inst, &par, &CsoConfig::default())) {
            Ok(run) => expect(&mut p, run.solution.radius == 0.0, || format!("radius {} at z = cover size {c}", run.solution.radius)),
            Err(e) => p.push(format!("solver: {e}")),
        }
        match brute_force_cso(&inst, k, c - 1, BRUTE_FORCE_CAP) {
            Ok((opt, _)) => expect(&mut p, opt > 0.0, || format!("radius 0 with only {} sets", c - 1)),
            Err(e) => p.push(format!("oracle: {e}")),
        }
        p
    });
    summary(cases, &probs)
}
