//! k-center over a join where up to z join results may be discarded.
//!
//! Draws a uniform sample of the join (or takes all of it when the join is
//! small), runs greedy disk peeling with BBD trees on the sample, and
//! discards the results left far from the chosen centers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constants::{radius, EpsBudget, RCRO_TAU_MULT};
use crate::error::Result;
use crate::geo::{wspd_distances, ActiveSet, BbdTree};
use crate::instance::{Claim, Params};
use crate::relational::Query;
use crate::search::{bisect, Probe};

use super::nearest;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RcroConfig {
    /// Constant in the sample size `mult k ln|Q| / (eps^2 delta)`.
    pub tau_mult: f64,
    /// Work on the whole join when it has at most this many results per
    /// input tuple; 0 always samples.
    pub direct_factor: f64,
}

impl Default for RcroConfig {
    fn default() -> Self {
        RcroConfig { tau_mult: RCRO_TAU_MULT, direct_factor: 4.0 }
    }
}

#[derive(Clone, Debug)]
pub struct RcroRun {
    pub centers: Vec<Vec<f64>>,
    /// Discarded join results.
    pub outliers: Vec<Vec<f64>>,
    /// Recomputed over the join minus the outliers.
    pub radius: f64,
    /// Accepted radius guess.
    pub r: f64,
    pub sampled: bool,
    /// Points the peeling ran on, and how many it left at acceptance.
    pub tau: usize,
    pub remaining: u64,
    pub threshold: f64,
    pub probes: Vec<Probe>,
    pub claim: Claim,
}

/// Greedy peeling at guess `r`: up to `k` times take the live point whose
/// BBD ball of radius `r` holds the most live weight, then remove its ball
/// of radius `(3+e) r`. Returns the centers when at most `allowed`
/// weight is left.
pub(crate) fn peel_heaviest(tree: &BbdTree, k: usize, r: f64, e: f64, allowed: f64) -> Option<(Vec<usize>, u64)> {
    let n = tree.num_points();
    let mut live = ActiveSet::new(tree, &vec![1; n]);
    let mut centers = Vec::new();
    for _ in 0..k {
        if !live.root_alive() {
            break;
        }
        let mut best: Option<(u64, usize)> = None;
        for i in 0..n {
            if !live.point_alive(tree, i) {
                continue;
            }
            let w: u64 = tree.ball_query_active(tree.point(i), r, e, &live).iter().map(|&u| live.weight[u]).sum();
            if best.is_none_or(|(bw, _)| w > bw) {
                best = Some((w, i));
            }
        }
        let (_, c) = best.expect("a live point exists");
        centers.push(c);
        let nodes = tree.ball_query_active(tree.point(c), (radius::CHARIKAR_PEEL + e) * r, e, &live);
        live.deactivate(tree, &nodes);
    }
    let left = live.total();
    (left as f64 <= allowed).then_some((centers, left))
}

pub fn rcro_claim(eps: f64) -> Claim {
    Claim { centers: 1.0, outliers: (1.0 + eps).powi(2), cost: radius::CHARIKAR_PEEL + eps }
}

pub fn solve_rcro(q: &Query, p: &Params, seed: u64, cfg: &RcroConfig) -> Result<RcroRun> {
    let budget = EpsBudget::rcro(p.eps);
    let e = budget.bbd;
    let all = q.counted(|_, _| true);
    let n = all.total;
    let claim = rcro_claim(p.eps);
    let mut run = RcroRun {
        centers: Vec::new(),
        outliers: Vec::new(),
        radius: 0.0,
        r: 0.0,
        sampled: false,
        tau: 0,
        remaining: 0,
        threshold: p.z as f64,
        probes: Vec::new(),
        claim,
    };
    if n <= p.z as u128 {
        all.for_each(|r| run.outliers.push(r.point));
        return Ok(run);
    }
    let sampled = n as f64 > cfg.direct_factor * q.db().size() as f64;
    let (points, threshold) = if sampled {
        let delta = p.z as f64 / n as f64;
        let tau = (cfg.tau_mult * p.k as f64 * (n as f64).ln() / (budget.sample * budget.sample * delta)).ceil().max(1.0) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = all.sample(&mut rng, tau)?.into_iter().map(|r| r.point).collect();
        (pts, (1.0 + budget.sample) * delta * tau as f64)
    } else {
        (all.collect().into_iter().map(|r| r.point).collect::<Vec<_>>(), p.z as f64)
    };
    let tree = BbdTree::build(&points);
    let radii = wspd_distances(&points, budget.wspd);
    let (found, probes) = bisect(&radii.values, |_, r| peel_heaviest(&tree, p.k, r, e, threshold));
    let (idx, (centers, left)) = found.expect("the largest distance leaves nothing to peel");
    let r = radii.values[idx];
    let mut cs: Vec<Vec<f64>> = centers.iter().map(|&c| points[c].clone()).collect();
    cs.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    cs.dedup();
    // Every peeled point is within (3+e)(1+e) r of its center; results
    // beyond that are the discarded ones.
    let keep = (radius::CHARIKAR_PEEL + e) * (1.0 + e) * r;
    all.for_each(|res| {
        let d = nearest(&cs, &res.point);
        if d > keep {
            run.outliers.push(res.point);
        } else {
            run.radius = run.radius.max(d);
        }
    });
    run.centers = cs;
    run.r = r;
    run.sampled = sampled;
    run.tau = points.len();
    run.remaining = left;
    run.threshold = threshold;
    run.probes = probes;
    Ok(run)
}
