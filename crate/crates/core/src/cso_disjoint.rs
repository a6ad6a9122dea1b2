//! Set-outlier k-center when the outlier sets are pairwise disjoint.
//!
//! For each radius guess the input is shrunk to a coreset: every set is
//! replaced by its Gonzalez centers (or dropped as an outlier when k balls
//! of radius 2r cannot cover it), and dense regions touching more sets than
//! the remaining outlier budget are carved out as balls that each cost one
//! center. The relaxation is solved on what is left.

use crate::constants::radius;
use crate::cso_general::{center_cap, lp_on_subset, threshold_sets, CsoConfig};
use crate::error::{Error, Result};
use crate::instance::{Claim, GeneralInstance, Metric, Params, SetSystem, TriSolution};
use crate::metric::{enumerate_radii, gonzalez_kcenter, CandidateRadii, RadiusSource};
use crate::search::{bisect, Probe};

/// Which distances the outer search runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusChoice {
    /// All pairwise distances when `n <= k m`, else distances among the
    /// per-set Gonzalez centers.
    Auto,
    AllPairs,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisjointConfig {
    pub lp: CsoConfig,
    pub radii: RadiusChoice,
}

impl Default for DisjointConfig {
    fn default() -> Self {
        DisjointConfig { lp: CsoConfig::default(), radii: RadiusChoice::Auto }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Skip {
    /// More uncoverable sets than the outlier budget.
    OutlierBudget,
    /// More dense extractions than centers.
    CenterBudget,
    /// Too many sets survive into the coreset.
    SetGuard,
    /// The coreset relaxation is infeasible.
    Relaxation,
}

/// A carved-out dense ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub center: usize,
    /// Coreset elements removed with it (radius `EXTRACT r`).
    pub members: Vec<usize>,
    /// Distinct sets met by the `DENSE r` ball at extraction time.
    pub touched: usize,
}

/// Coreset built for one radius guess.
#[derive(Clone, Debug, PartialEq)]
pub struct CoresetState {
    pub r: f64,
    /// Sets removed because k balls of radius `2r` miss part of them.
    pub h0: Vec<usize>,
    pub zbar: usize,
    /// Surviving Gonzalez centers after phase 1, per set.
    pub reps: Vec<Vec<usize>>,
    pub extracted: Vec<Extraction>,
    pub k_prime: usize,
    /// Elements and sets left after phase 2.
    pub elems: Vec<usize>,
    pub sets: Vec<usize>,
}

impl CoresetState {
    /// The coreset as a standalone instance (indices relabeled densely),
    /// with its center and outlier budgets. `None` when it is empty.
    pub fn to_instance(&self, inst: &dyn SetSystem) -> Option<(GeneralInstance, usize, usize)> {
        if self.elems.is_empty() {
            return None;
        }
        let m: Vec<Vec<f64>> = self.elems.iter().map(|&a| self.elems.iter().map(|&b| inst.dist(a, b)).collect()).collect();
        let mut pos = vec![usize::MAX; inst.len()];
        for (a, &e) in self.elems.iter().enumerate() {
            pos[e] = a;
        }
        let sets = self
            .sets
            .iter()
            .map(|&j| inst.set(j).iter().filter(|&&i| pos[i] != usize::MAX).map(|&i| pos[i]).collect())
            .collect();
        let g = GeneralInstance::new(Metric::Matrix(m), sets).ok()?;
        Some((g, self.k_prime, self.zbar))
    }
}

fn require_disjoint(inst: &dyn SetSystem) -> Result<()> {
    if inst.frequency() > 1 {
        return Err(Error::Precondition(format!("outlier sets overlap (frequency {})", inst.frequency())));
    }
    Ok(())
}

/// Gonzalez centers of every set, in pick order.
pub fn set_centers(inst: &dyn SetSystem, k: usize) -> Vec<(Vec<usize>, f64)> {
    (0..inst.num_sets())
        .map(|j| {
            let s = inst.set(j);
            if s.is_empty() {
                (Vec::new(), 0.0)
            } else {
                gonzalez_kcenter(s, |a, b| inst.dist(a, b), k)
            }
        })
        .collect()
}

/// Keeps points in order, dropping any within `radius` of a kept one.
pub(crate) fn dedup_within<F: Fn(usize, usize) -> f64>(pts: &[usize], dist: F, radius: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for &p in pts {
        if kept.iter().all(|&q| dist(p, q) > radius) {
            kept.push(p);
        }
    }
    kept
}

/// Phase 1: per-set pruning. Returns the kept centers of every set, the
/// removed sets and the remaining outlier budget.
pub fn coreset_phase1(
    inst: &dyn SetSystem,
    centers: &[(Vec<usize>, f64)],
    r: f64,
    z: usize,
) -> std::result::Result<(Vec<Vec<usize>>, Vec<usize>, usize), Skip> {
    let mut h0 = Vec::new();
    let mut reps = Vec::with_capacity(centers.len());
    for (j, (c, rad)) in centers.iter().enumerate() {
        if *rad > radius::PRUNE * r {
            h0.push(j);
            reps.push(Vec::new());
        } else {
            reps.push(dedup_within(c, |a, b| inst.dist(a, b), radius::PRUNE * r));
        }
    }
    if h0.len() > z {
        return Err(Skip::OutlierBudget);
    }
    let zbar = z - h0.len();
    Ok((reps, h0, zbar))
}

/// Phase 2: one ascending pass extracting dense balls.
pub fn coreset_phase2(
    inst: &dyn SetSystem,
    reps: Vec<Vec<usize>>,
    h0: Vec<usize>,
    zbar: usize,
    r: f64,
    k: usize,
    z: usize,
) -> std::result::Result<CoresetState, Skip> {
    let n = inst.len();
    let mut alive = vec![false; n];
    for c in &reps {
        for &i in c {
            alive[i] = true;
        }
    }
    let set_of = |i: usize| inst.sets_of(i)[0];
    let mut extracted = Vec::new();
    let mut seen = vec![usize::MAX; inst.num_sets()];
    for p in 0..n {
        if !alive[p] {
            continue;
        }
        let mut touched = 0;
        for q in 0..n {
            if alive[q] && inst.dist(p, q) <= radius::DENSE * r {
                let j = set_of(q);
                if seen[j] != p {
                    seen[j] = p;
                    touched += 1;
                }
            }
        }
        if touched > zbar {
            let members: Vec<usize> = (0..n).filter(|&q| alive[q] && inst.dist(p, q) <= radius::EXTRACT * r).collect();
            for &q in &members {
                alive[q] = false;
            }
            extracted.push(Extraction { center: p, members, touched });
        }
    }
    if extracted.len() > k {
        return Err(Skip::CenterBudget);
    }
    let elems: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let mut sets: Vec<usize> = elems.iter().map(|&i| set_of(i)).collect();
    sets.sort_unstable();
    sets.dedup();
    if sets.len() > inst.num_sets().min(2 * k * z) {
        return Err(Skip::SetGuard);
    }
    Ok(CoresetState { r, h0, zbar, reps, k_prime: k - extracted.len(), extracted, elems, sets })
}

/// Solves the coreset relaxation at radius `DENSE r`, rounds it with
/// `COARSE_PEEL r` balls and reassembles a solution of the full instance.
pub fn solve_lp2_and_reassemble(inst: &dyn SetSystem, state: &CoresetState, p: &Params, cfg: &CsoConfig) -> std::result::Result<TriSolution, Skip> {
    let r = state.r;
    let (mut chat, mut hhat) = (Vec::new(), Vec::new());
    if !state.elems.is_empty() {
        if state.k_prime + state.zbar == 0 {
            return Err(Skip::Relaxation);
        }
        let frac = lp_on_subset(inst, &state.elems, &state.sets, radius::DENSE * r, state.k_prime, state.zbar, cfg).ok_or(Skip::Relaxation)?;
        hhat = threshold_sets(&frac.y, 1).into_iter().map(|b| state.sets[b]).collect();
        let mut gone = vec![false; inst.num_sets()];
        hhat.iter().for_each(|&j| gone[j] = true);
        let mut active: Vec<bool> = state.elems.iter().map(|&i| !gone[inst.sets_of(i)[0]]).collect();
        for a in 0..state.elems.len() {
            if !active[a] {
                continue;
            }
            let c = state.elems[a];
            chat.push(c);
            for b in 0..state.elems.len() {
                if active[b] && inst.dist(c, state.elems[b]) <= radius::COARSE_PEEL * r {
                    active[b] = false;
                }
            }
        }
    }
    let mut outliers = hhat;
    outliers.extend_from_slice(&state.h0);
    let mut gone = vec![false; inst.num_sets()];
    outliers.iter().for_each(|&j| gone[j] = true);
    let mut centers = chat;
    for x in &state.extracted {
        if let Some(&c) = x.members.iter().find(|&&i| !gone[inst.sets_of(i)[0]]) {
            centers.push(c);
        }
    }
    let claim = Claim { centers: center_cap(p.k, cfg.eps_lp) / p.k as f64, outliers: 2.0, cost: radius::DISJOINT_COST };
    Ok(TriSolution::build(inst, centers, outliers, claim))
}

/// Coreset and reassembled solution at one radius.
pub fn solve_at_radius(
    inst: &dyn SetSystem,
    centers: &[(Vec<usize>, f64)],
    r: f64,
    p: &Params,
    cfg: &CsoConfig,
) -> std::result::Result<(CoresetState, TriSolution), Skip> {
    let (reps, h0, zbar) = coreset_phase1(inst, centers, r, p.z)?;
    let state = coreset_phase2(inst, reps, h0, zbar, r, p.k, p.z)?;
    let sol = solve_lp2_and_reassemble(inst, &state, p, cfg)?;
    Ok((state, sol))
}

/// Smallest float `r` with `m * r >= d` in floating point.
pub(crate) fn breakpoint(d: f64, m: f64) -> f64 {
    let mut r = d / m;
    while m * r < d {
        r = r.next_up();
    }
    r
}

/// Candidate radii for the outer search.
///
/// The reduced list used when `n > k m` consists of the center-pair
/// distances together with every radius at which a decision of the
/// coreset pipeline can flip: half of each Gonzalez radius and each
/// center-pair distance divided by the prune, dense, extract and peel
/// multipliers. The pipeline behaves identically on the whole interval
/// between two consecutive breakpoints, so the smallest breakpoint above the
/// optimum reproduces the run at the optimum.
pub fn disjoint_radii(inst: &dyn SetSystem, centers: &[(Vec<usize>, f64)], k: usize, choice: RadiusChoice) -> CandidateRadii {
    let n = inst.len();
    if choice == RadiusChoice::AllPairs || n <= k * inst.num_sets() {
        return enumerate_radii(inst);
    }
    let pts: Vec<usize> = centers.iter().flat_map(|(c, _)| c.iter().copied()).collect();
    let mut v: Vec<f64> = centers.iter().map(|(_, rad)| breakpoint(*rad, radius::PRUNE)).collect();
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let d = inst.dist(pts[a], pts[b]);
            v.push(d);
            for m in [radius::PRUNE, radius::DENSE, radius::EXTRACT, radius::COARSE_PEEL] {
                v.push(breakpoint(d, m));
            }
        }
    }
    CandidateRadii::from_values(v, RadiusSource::CenterPairs)
}

#[derive(Clone, Debug)]
pub struct DisjointRun {
    pub solution: TriSolution,
    pub coreset: CoresetState,
    pub probes: Vec<Probe>,
    pub skips: Vec<(f64, Skip)>,
    pub radii: RadiusSource,
}

pub fn solve_cso_disjoint(inst: &dyn SetSystem, p: &Params, cfg: &DisjointConfig) -> Result<DisjointRun> {
    require_disjoint(inst)?;
    let centers = set_centers(inst, p.k);
    let mut radii = disjoint_radii(inst, &centers, p.k, cfg.radii);
    let mut skips = Vec::new();
    let run = |r: f64, skips: &mut Vec<(f64, Skip)>| match solve_at_radius(inst, &centers, r, p, &cfg.lp) {
        Ok(v) => Some(v),
        Err(s) => {
            skips.push((r, s));
            None
        }
    };
    let (mut found, mut probes) = bisect(&radii.values, |_, r| run(r, &mut skips));
    if found.is_none() && radii.source != RadiusSource::AllPairs {
        // The reduced list can stop short of a feasible radius.
        radii = enumerate_radii(inst);
        let (f, pr) = bisect(&radii.values, |_, r| run(r, &mut skips));
        found = f;
        probes.extend(pr);
    }
    let (_, (coreset, solution)) = found.ok_or_else(|| Error::Precondition("no radius admits a coreset solution".into()))?;
    Ok(DisjointRun { solution, coreset, probes, skips, radii: radii.source })
}
