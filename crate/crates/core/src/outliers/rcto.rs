//! k-center over a join where up to z tuples of any relation may be
//! discarded, by random partitioning of the input.
//!
//! Each trial splits the tuples in two at random and clusters the join of
//! the first half. For a radius guess `r`, results outside the L-infinity
//! cubes of half-side `r_S1 + sqrt(d) r` around those centers are
//! witnesses: each must involve a tuple of the second half, and all of
//! its tuples are discarded. A guess succeeds when at most `z` witnesses
//! empty the complement of the cubes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{rcto_cost_factor, RCTO_TRIAL_CAP, RCTO_TRIAL_MULT};
use crate::error::{Error, Result};
use crate::geo::cube_complement;
use crate::instance::{linf, Claim, Params, Rect};
use crate::relational::distance::linf_candidates;
use crate::relational::{rel_cluster, ClusterOracle, Mask, Query, TupleId};
use crate::search::bisect;

use super::{points_of, validate_tuple_solution, wipe_out, TupleSolution};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RctoConfig {
    /// Constant in the trial count `mult 2^(gk+z) ln N`.
    pub trial_mult: f64,
    /// Refuse when more trials than this are needed.
    pub trial_cap: usize,
    pub oracle: ClusterOracle,
}

impl Default for RctoConfig {
    fn default() -> Self {
        RctoConfig { trial_mult: RCTO_TRIAL_MULT, trial_cap: RCTO_TRIAL_CAP, oracle: ClusterOracle::default() }
    }
}

/// A result found outside the cubes, with the tuples it is built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub tuples: Vec<TupleId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuessTrace {
    pub r: f64,
    pub r_hat: f64,
    pub witnesses: Vec<Witness>,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub r: f64,
    pub r_hat: f64,
    pub outliers: Vec<TupleId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionTrial {
    pub index: usize,
    pub seed: u64,
    /// Tuples placed in the first half; the rest form the second.
    pub in_first: Mask,
    pub centers: Vec<Vec<f64>>,
    pub r_s1: f64,
    pub guesses: Vec<GuessTrace>,
    pub outcome: Option<TrialOutcome>,
}

#[derive(Clone, Debug)]
pub struct RctoRun {
    pub solution: TupleSolution,
    pub trials: Vec<PartitionTrial>,
    /// Index of the trial the solution comes from.
    pub best: Option<usize>,
    pub required_trials: usize,
    pub claim: Claim,
}

pub fn rcto_claim(q: &Query) -> Claim {
    Claim { centers: 1.0, outliers: q.db().relations().len() as f64, cost: rcto_cost_factor(q.dim()) }
}

/// Trials needed for the partition to separate an optimal solution with
/// probability `1 - 1/N`.
pub fn required_trials(q: &Query, k: usize, z: usize, mult: f64) -> f64 {
    let g = q.db().relations().len() as f64;
    let n = (q.db().size() as f64).max(2.0);
    (mult * (g * k as f64 + z as f64).exp2() * n.ln()).ceil().max(1.0)
}

fn cells(centers: &[Vec<f64>], h: f64, d: usize) -> Vec<Rect> {
    if centers.is_empty() {
        vec![Rect::full(d)]
    } else {
        let cubes: Vec<Rect> = centers.iter().map(|c| Rect::cube(c, h)).collect();
        cube_complement(&cubes)
    }
}

/// One radius guess of a trial. Aborts as soon as a witness is built only
/// from first-half tuples, or when `z` witnesses leave results behind.
fn guess(q: &Query, in_first: &Mask, centers: &[Vec<f64>], r_s1: f64, r: f64, z: usize) -> GuessTrace {
    let r_hat = r_s1 + (q.dim() as f64).sqrt() * r;
    let free = cells(centers, r_hat, q.dim());
    let mut trace = GuessTrace { r, r_hat, witnesses: Vec::new(), feasible: false };
    let mut removed: Vec<TupleId> = Vec::new();
    loop {
        let rest = q.without(&removed);
        let Some(w) = free.iter().find_map(|c| rest.counted_rect(c).first()) else {
            trace.feasible = true;
            return trace;
        };
        if trace.witnesses.len() == z {
            return trace;
        }
        let tuples: Vec<TupleId> = w.tuples().collect();
        let first_only = tuples.iter().all(|t| in_first[t.rel][t.row]);
        removed.extend(tuples.iter().copied());
        trace.witnesses.push(Witness { point: w.point, tuples });
        if first_only {
            return trace;
        }
    }
}

fn outliers_of(trace: &GuessTrace) -> Vec<TupleId> {
    let mut t: Vec<TupleId> = trace.witnesses.iter().flat_map(|w| w.tuples.iter().copied()).collect();
    t.sort_unstable();
    t.dedup();
    t
}

fn run_trial(q: &Query, index: usize, seed: u64, radii: &[f64], k: usize, z: usize, oracle: ClusterOracle) -> PartitionTrial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let in_first: Mask = q.mask().iter().map(|m| m.iter().map(|&a| a && rng.gen_bool(0.5)).collect()).collect();
    let s1 = rel_cluster(&q.restrict(in_first.clone()), k, oracle);
    let centers = points_of(&s1.centers);
    let mut guesses = Vec::new();
    let (found, _) = bisect(radii, |_, r| {
        let g = guess(q, &in_first, &centers, s1.radius, r, z);
        let out = g.feasible.then(|| TrialOutcome { r, r_hat: g.r_hat, outliers: outliers_of(&g) });
        guesses.push(g);
        out
    });
    PartitionTrial { index, seed, in_first, centers, r_s1: s1.radius, guesses, outcome: found.map(|(_, o)| o) }
}

pub fn solve_rcto(q: &Query, p: &Params, seed: u64, cfg: &RctoConfig) -> Result<RctoRun> {
    let claim = rcto_claim(q);
    let need = required_trials(q, p.k, p.z, cfg.trial_mult);
    let tau = need.min(usize::MAX as f64) as usize;
    let mut run = RctoRun {
        solution: TupleSolution { centers: Vec::new(), outliers: Vec::new(), radius: 0.0 },
        trials: Vec::new(),
        best: None,
        required_trials: tau,
        claim,
    };
    if q.counted(|_, _| true).total == 0 {
        return Ok(run);
    }
    if let Some(all) = wipe_out(q, p.z, None) {
        run.solution.outliers = all;
        return Ok(run);
    }
    if need > cfg.trial_cap as f64 {
        return Err(Error::CapExceeded(format!("{need} partition trials needed, cap is {}", cfg.trial_cap)));
    }
    let radii = linf_candidates(q).values;
    run.trials = (0..tau).map(|i| run_trial(q, i, seed, &radii, p.k, p.z, cfg.oracle)).collect();
    let best = run
        .trials
        .iter()
        .filter_map(|t| t.outcome.as_ref().map(|o| (o.r_hat, t.index)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let Some((_, bi)) = best else {
        return Err(Error::Precondition(format!("none of {tau} partition trials found a feasible radius")));
    };
    let trial = &run.trials[bi];
    let outcome = trial.outcome.as_ref().expect("best trial has an outcome");
    // One representative of the remaining join inside every cube.
    let rest = q.without(&outcome.outliers);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tau as u64);
    let centers: Vec<Vec<f64>> = trial
        .centers
        .iter()
        .filter_map(|c| rest.counted_rect(&Rect::cube(c, outcome.r_hat)).sample_one(&mut rng).map(|r| r.point))
        .collect();
    let report = validate_tuple_solution(q, &centers, &outcome.outliers);
    run.solution = TupleSolution { centers, outliers: outcome.outliers.clone(), radius: report.radius };
    run.best = Some(bi);
    Ok(run)
}

/// Re-checks every recorded witness: it lies outside all cubes of its
/// guess and uses no tuple discarded before it.
pub fn replay_witnesses(trial: &PartitionTrial) -> bool {
    trial.guesses.iter().all(|g| {
        let mut seen: Vec<TupleId> = Vec::new();
        g.witnesses.iter().all(|w| {
            let outside = trial.centers.iter().all(|c| linf(c, &w.point) > g.r_hat);
            let fresh = w.tuples.iter().all(|t| !seen.contains(t));
            seen.extend(w.tuples.iter().copied());
            outside && fresh
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::oracle::rcto_opt;
    use crate::relational::{Database, Relation};

    fn planted() -> Database {
        // R(A) joins S(A,B); the S row (3, 70) alone yields the far result.
        Database::new(
            vec!["A".into(), "B".into()],
            vec![
                Relation { name: "R".into(), attrs: vec![0], rows: vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]] },
                Relation {
                    name: "S".into(),
                    attrs: vec![0, 1],
                    rows: vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0], vec![3.0, 1.0], vec![3.0, 70.0]],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn bad_tuple_is_discarded() {
        let db = planted();
        let q = Query::new(&db).unwrap();
        let p = Params::new(1, 1, 0.2).unwrap();
        let run = solve_rcto(&q, &p, 3, &RctoConfig::default()).unwrap();
        assert!(run.trials.iter().all(replay_witnesses));
        let rep = validate_tuple_solution(&q, &run.solution.centers, &run.solution.outliers);
        assert!(rep.centers_valid);
        assert!(rep.num_centers <= 1);
        assert!(rep.num_outliers <= 2);
        assert!(!q.without(&run.solution.outliers).contains(&[3.0, 70.0]));
        let (opt, _) = rcto_opt(&q, 1, 1, 10_000_000).unwrap();
        assert!(rep.radius <= run.claim.cost * opt, "{} vs {}", rep.radius, opt);
    }

    #[test]
    fn trial_cap_refuses() {
        let db = planted();
        let q = Query::new(&db).unwrap();
        let cfg = RctoConfig { trial_cap: 4, ..RctoConfig::default() };
        assert!(matches!(solve_rcto(&q, &Params::new(2, 2, 0.2).unwrap(), 1, &cfg), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn huge_budget_wipes_a_relation() {
        let db = planted();
        let q = Query::new(&db).unwrap();
        let run = solve_rcto(&q, &Params::new(1, 4, 0.2).unwrap(), 1, &RctoConfig::default()).unwrap();
        assert_eq!(run.solution.radius, 0.0);
        assert_eq!(run.solution.outliers.len(), 4);
    }
}
