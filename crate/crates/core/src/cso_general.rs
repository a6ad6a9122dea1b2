//! Set-outlier k-center in a general metric: LP relaxation per candidate
//! radius, threshold rounding of the set variables and greedy ball peeling.

use crate::constants::EPS_LP;
use crate::error::{Error, Result};
use crate::instance::{Claim, Params, SetSystem, TriSolution};
use crate::metric::enumerate_radii;
use crate::mwu::{mwu_solve, DenseSystem, MwuConfig};
use crate::search::{bisect, Probe};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsoConfig {
    /// Additive slack of the coverage constraints.
    pub eps_lp: f64,
    pub mwu: MwuConfig,
}

impl Default for CsoConfig {
    fn default() -> Self {
        CsoConfig { eps_lp: EPS_LP, mwu: MwuConfig::default() }
    }
}

/// Center mass per element and outlier mass per set.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalAssignment {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub iterations: usize,
    pub budget: usize,
    pub min_coverage: f64,
}

/// Coverage system at radius `r` over an element subset: row and x-slot
/// `a` stand for element `elems[a]`, y-slot `b` for set `sets[b]`.
pub fn dense_system(inst: &dyn SetSystem, elems: &[usize], sets: &[usize], r: f64) -> DenseSystem {
    let mut slot = vec![usize::MAX; inst.num_sets()];
    for (b, &j) in sets.iter().enumerate() {
        slot[j] = b;
    }
    let balls = elems
        .iter()
        .map(|&i| (0..elems.len()).filter(|&l| inst.dist(i, elems[l]) <= r).collect())
        .collect();
    let member = elems
        .iter()
        .map(|&i| inst.sets_of(i).iter().filter(|&&j| slot[j] != usize::MAX).map(|&j| slot[j]).collect())
        .collect();
    DenseSystem { nx: elems.len(), ny: sets.len(), balls, member }
}

/// Decides the relaxation at radius `r`. `None` means infeasible; the
/// engine never reports that for a radius admitting an integral solution.
pub fn lp1_feasible(inst: &dyn SetSystem, r: f64, k: usize, z: usize, cfg: &CsoConfig) -> Option<FractionalAssignment> {
    let elems: Vec<usize> = (0..inst.len()).collect();
    let sets: Vec<usize> = (0..inst.num_sets()).collect();
    lp_on_subset(inst, &elems, &sets, r, k, z, cfg)
}

pub(crate) fn lp_on_subset(
    inst: &dyn SetSystem,
    elems: &[usize],
    sets: &[usize],
    r: f64,
    k: usize,
    z: usize,
    cfg: &CsoConfig,
) -> Option<FractionalAssignment> {
    let mut sys = dense_system(inst, elems, sets, r);
    let s = mwu_solve(&mut sys, k, z, cfg.eps_lp, &cfg.mwu).feasible()?;
    Some(FractionalAssignment { x: s.x, y: s.y, iterations: s.iterations, budget: s.budget, min_coverage: s.min_coverage })
}

/// Greedy peeling: repeatedly take the lowest-index active element as a
/// center and deactivate everything within `radius` of it.
pub fn peel(inst: &dyn SetSystem, active: &mut [bool], radius: f64) -> Vec<usize> {
    let mut centers = Vec::new();
    for c in 0..active.len() {
        if !active[c] {
            continue;
        }
        centers.push(c);
        for i in 0..active.len() {
            if active[i] && inst.dist(c, i) <= radius {
                active[i] = false;
            }
        }
    }
    centers
}

/// Sets whose mass reaches `1/(2f)`.
pub fn threshold_sets(y: &[f64], f: usize) -> Vec<usize> {
    let t = 1.0 / (2.0 * f.max(1) as f64);
    (0..y.len()).filter(|&j| y[j] >= t).collect()
}

/// Rounds a fractional assignment at radius `r`.
pub fn round_lp1(inst: &dyn SetSystem, r: f64, frac: &FractionalAssignment, k: usize, eps_lp: f64) -> TriSolution {
    let f = inst.frequency();
    let outliers = threshold_sets(&frac.y, f);
    let mut active = vec![true; inst.len()];
    for &j in &outliers {
        for &i in inst.set(j) {
            active[i] = false;
        }
    }
    let centers = peel(inst, &mut active, 2.0 * r);
    let claim = Claim { centers: center_cap(k, eps_lp) / k as f64, outliers: (2 * f) as f64, cost: 2.0 };
    TriSolution::build(inst, centers, outliers, claim)
}

/// `ceil(2k / (1 - 2 eps))`, the center cap under coverage slack `eps`.
pub fn center_cap(k: usize, eps: f64) -> f64 {
    (2.0 * k as f64 / (1.0 - 2.0 * eps)).ceil()
}

/// Solver output with the search record.
#[derive(Clone, Debug)]
pub struct CsoRun {
    pub solution: TriSolution,
    /// Radius of the last feasible relaxation.
    pub r: f64,
    pub frac: FractionalAssignment,
    pub probes: Vec<Probe>,
}

/// Binary search over all pairwise distances, returning the rounding of the
/// last feasible relaxation.
pub fn solve_cso(inst: &dyn SetSystem, p: &Params, cfg: &CsoConfig) -> Result<CsoRun> {
    let radii = enumerate_radii(inst);
    let (found, probes) = bisect(&radii.values, |_, r| lp1_feasible(inst, r, p.k, p.z, cfg).map(|fr| (r, fr)));
    let (_, (r, frac)) = found.ok_or_else(|| Error::Precondition("relaxation infeasible at the largest distance".into()))?;
    let solution = round_lp1(inst, r, &frac, p.k, cfg.eps_lp);
    Ok(CsoRun { solution, r, frac, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{GeneralInstance, Metric};

    fn line(xs: &[f64], sets: Vec<Vec<usize>>) -> GeneralInstance {
        GeneralInstance::new(Metric::Euclidean(xs.iter().map(|&x| vec![x]).collect()), sets).unwrap()
    }

    #[test]
    fn threshold_examples() {
        assert!(threshold_sets(&[0.0, 0.0], 1).is_empty());
        assert_eq!(threshold_sets(&[0.5], 1), vec![0]);
    }

    #[test]
    fn identical_points() {
        let g = line(&[2.0, 2.0, 2.0], vec![vec![0, 1, 2]]);
        let run = solve_cso(&g, &Params::new(1, 1, 0.1).unwrap(), &CsoConfig::default()).unwrap();
        assert_eq!(run.solution.radius, 0.0);
        assert!(run.solution.centers.len() <= 1);
    }

    #[test]
    fn everything_feasible_at_max_distance() {
        let g = line(&[0.0, 3.0, 9.0], vec![vec![0], vec![1], vec![2]]);
        assert!(lp1_feasible(&g, 9.0, 1, 1, &CsoConfig::default()).is_some());
    }

    #[test]
    fn all_centers_at_zero() {
        let g = line(&[0.0, 3.0, 9.0], vec![vec![0, 1, 2]]);
        assert!(lp1_feasible(&g, 0.0, 3, 1, &CsoConfig::default()).is_some());
    }

    #[test]
    fn peeled_centers_are_separated() {
        let g = line(&[0.0, 1.0, 10.0, 11.0], vec![vec![2, 3], vec![0, 1]]);
        let run = solve_cso(&g, &Params::new(1, 1, 0.1).unwrap(), &CsoConfig::default()).unwrap();
        for &a in &run.solution.centers {
            for &b in &run.solution.centers {
                assert!(a == b || g.dist(a, b) > 2.0 * run.r);
            }
        }
        assert!(run.solution.radius <= 2.0);
    }
}
