//! Geometric set-outlier k-center with pairwise disjoint rectangles.
//!
//! Same coreset pipeline as the general disjoint solver, with the dense-ball
//! scan done on a BBD tree. Every kept point registers its set index at the
//! canonical nodes of its `DENSE (1+e) r` ball; after an ancestor-uniqueness
//! pass each set appears at most once on any leaf-to-root path, so the
//! number of sets near a point is the total index count along its path.
//! Extractions use a twin copy of the tree with activity flags.

use std::collections::BTreeMap;

use crate::constants::{gcso_disjoint_cost_factor, radius, EpsBudget};
use crate::cso_disjoint::{coreset_phase1, set_centers, Extraction, Skip};
use crate::error::{Error, Result};
use crate::gcso::{mwu_solve_geo, peel_geometric, GcsoConfig, GeoIndex};
use crate::cso_general::{center_cap, threshold_sets};
use crate::geo::{wspd_distances, ActiveSet, BbdTree};
use crate::instance::{Claim, GeometricInstance, Params, Rect, SetSystem, TriSolution};
use crate::search::{bisect, Probe};

/// Per-node set indices with counters.
#[derive(Clone, Debug, PartialEq)]
pub struct SetCounters {
    pub sets: Vec<BTreeMap<usize, usize>>,
}

fn topmost_holder(tree: &BbdTree, sets: &[BTreeMap<usize, usize>], from: usize, j: usize) -> Option<usize> {
    let mut found = None;
    let mut v = from;
    while v != usize::MAX {
        if sets[v].contains_key(&j) {
            found = Some(v);
        }
        v = tree.node(v).parent;
    }
    found
}

impl SetCounters {
    /// Registers every live point's incidences, then keeps each index only
    /// at its topmost node on every path, moving counts up.
    pub fn build(tree: &BbdTree, incid: &[Vec<usize>], set_of: &[usize], alive: &[bool]) -> SetCounters {
        let mut sets = vec![BTreeMap::new(); tree.nodes().len()];
        for p in 0..incid.len() {
            if alive[p] {
                for &u in &incid[p] {
                    *sets[u].entry(set_of[p]).or_insert(0) += 1;
                }
            }
        }
        for p in 0..incid.len() {
            if !alive[p] {
                continue;
            }
            let j = set_of[p];
            for &u in &incid[p] {
                let parent = tree.node(u).parent;
                if parent == usize::MAX {
                    continue;
                }
                if let Some(v) = topmost_holder(tree, &sets, parent, j) {
                    sets[u].remove(&j);
                    *sets[v].get_mut(&j).expect("holder has the index") += 1;
                }
            }
        }
        // Counts moved up once per incidence; the raw count at each
        // topmost node already included its own incidences.
        SetCounters { sets }
    }

    /// Sets registered along the path of point `p`.
    pub fn count(&self, tree: &BbdTree, p: usize) -> usize {
        tree.path(p).map(|v| self.sets[v].len()).sum()
    }

    /// Withdraws the incidences of a deleted point.
    pub fn remove_point(&mut self, tree: &BbdTree, incid: &[usize], j: usize) {
        for &u in incid {
            let v = topmost_holder(tree, &self.sets, u, j).expect("incidence is registered");
            let c = self.sets[v].get_mut(&j).unwrap();
            *c -= 1;
            if *c == 0 {
                self.sets[v].remove(&j);
            }
        }
    }
}

/// Dense-ball scan over kept points, indices into `ginst`.
pub struct GeoPhase2<'a> {
    pub ginst: &'a GeometricInstance,
    /// Kept points per set after phase 1.
    pub reps: &'a [Vec<usize>],
    pub zbar: usize,
    pub r: f64,
    pub eps: f64,
    /// Compare the incremental counters with a rebuild after each deletion.
    pub verify: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeoCoreset {
    pub extracted: Vec<Extraction>,
    pub elems: Vec<usize>,
    pub sets: Vec<usize>,
    /// Rebuild comparisons made and how many disagreed.
    pub checks: usize,
    pub mismatches: usize,
}

impl GeoPhase2<'_> {
    pub fn run(&self) -> GeoCoreset {
        let kept: Vec<usize> = {
            let mut v: Vec<usize> = self.reps.iter().flatten().copied().collect();
            v.sort_unstable();
            v
        };
        let mut out = GeoCoreset { extracted: Vec::new(), elems: Vec::new(), sets: Vec::new(), checks: 0, mismatches: 0 };
        if kept.is_empty() {
            return out;
        }
        let coords: Vec<Vec<f64>> = kept.iter().map(|&i| self.ginst.points()[i].clone()).collect();
        let set_of: Vec<usize> = kept.iter().map(|&i| self.ginst.sets_of(i)[0]).collect();
        let tree = BbdTree::build(&coords);
        let dense = radius::DENSE * (1.0 + self.eps) * self.r;
        let incid: Vec<Vec<usize>> = coords.iter().map(|c| tree.ball_query(c, dense, self.eps)).collect();
        let mut alive = vec![true; kept.len()];
        let mut counters = SetCounters::build(&tree, &incid, &set_of, &alive);
        let mut twin = ActiveSet::new(&tree, &vec![1; kept.len()]);
        let extract = radius::EXTRACT * (1.0 + self.eps) * self.r;
        for a in 0..kept.len() {
            if !alive[a] {
                continue;
            }
            let touched = counters.count(&tree, a);
            if touched <= self.zbar {
                continue;
            }
            let nodes = tree.ball_query_active(&coords[a], extract, self.eps, &twin);
            let mut members: Vec<usize> = nodes.iter().flat_map(|&u| twin.live_points(&tree, u)).collect();
            members.sort_unstable();
            twin.deactivate(&tree, &nodes);
            for &q in &members {
                alive[q] = false;
                counters.remove_point(&tree, &incid[q], set_of[q]);
            }
            if self.verify {
                out.checks += 1;
                if counters != SetCounters::build(&tree, &incid, &set_of, &alive) {
                    out.mismatches += 1;
                }
            }
            out.extracted.push(Extraction { center: kept[a], members: members.iter().map(|&q| kept[q]).collect(), touched });
        }
        out.elems = (0..kept.len()).filter(|&a| alive[a]).map(|a| kept[a]).collect();
        out.sets = (0..kept.len()).filter(|&a| alive[a]).map(|a| set_of[a]).collect();
        out.sets.sort_unstable();
        out.sets.dedup();
        out
    }
}

/// Coreset, reassembled solution and bookkeeping at one radius.
#[derive(Clone, Debug)]
pub struct GeoDisjointStep {
    pub r: f64,
    pub h0: Vec<usize>,
    pub zbar: usize,
    pub k_prime: usize,
    pub coreset: GeoCoreset,
    pub centers: Vec<usize>,
    pub outliers: Vec<usize>,
}

/// Everything after phase 1: dense extraction, the coreset LP at radius
/// `DENSE r`, peeling and reassembly. Point and set indices refer to
/// `ginst`, whose rectangles must be pairwise disjoint on its points.
#[allow(clippy::too_many_arguments)]
pub fn disjoint_after_phase1(
    ginst: &GeometricInstance,
    reps: &[Vec<usize>],
    h0: Vec<usize>,
    zbar: usize,
    k: usize,
    z: usize,
    r: f64,
    budget: &EpsBudget,
    cfg: &GcsoConfig,
    verify: bool,
) -> std::result::Result<GeoDisjointStep, Skip> {
    let coreset = GeoPhase2 { ginst, reps, zbar, r, eps: budget.bbd, verify }.run();
    if coreset.extracted.len() > k {
        return Err(Skip::CenterBudget);
    }
    if coreset.sets.len() > ginst.num_sets().min(2 * k * z) {
        return Err(Skip::SetGuard);
    }
    let k_prime = k - coreset.extracted.len();
    let mut chat = Vec::new();
    let mut hhat = Vec::new();
    if !coreset.elems.is_empty() {
        if k_prime + zbar == 0 {
            return Err(Skip::Relaxation);
        }
        let pts: Vec<Vec<f64>> = coreset.elems.iter().map(|&i| ginst.points()[i].clone()).collect();
        let rects: Vec<Rect> = coreset.sets.iter().map(|&j| ginst.rects()[j].clone()).collect();
        let index = GeoIndex::build(&pts, &rects).map_err(|_| Skip::Relaxation)?;
        let lp_r = radius::DENSE * r;
        let frac = mwu_solve_geo(&index, lp_r, k_prime, zbar, budget, &cfg.mwu).ok_or(Skip::Relaxation)?;
        let chosen = threshold_sets(&frac.y, 1);
        let act = crate::gcso::active_points(&index, &chosen);
        chat = peel_geometric(&pts, &act, lp_r, budget.bbd).into_iter().map(|a| coreset.elems[a]).collect();
        hhat = chosen.into_iter().map(|b| coreset.sets[b]).collect();
    }
    let mut outliers = hhat;
    outliers.extend_from_slice(&h0);
    let mut gone = vec![false; ginst.num_sets()];
    outliers.iter().for_each(|&j| gone[j] = true);
    let mut centers = chat;
    for x in &coreset.extracted {
        if let Some(&c) = x.members.iter().find(|&&i| !gone[ginst.sets_of(i)[0]]) {
            centers.push(c);
        }
    }
    Ok(GeoDisjointStep { r, h0, zbar, k_prime, coreset, centers, outliers })
}

#[derive(Clone, Debug)]
pub struct GcsoDisjointRun {
    pub solution: TriSolution,
    pub step: GeoDisjointStep,
    pub probes: Vec<Probe>,
    pub skips: Vec<(f64, Skip)>,
}

pub fn gcso_disjoint_claim(p: &Params, eps_lp: f64) -> Claim {
    Claim { centers: center_cap(p.k, eps_lp) / p.k as f64, outliers: 2.0, cost: gcso_disjoint_cost_factor(p.eps) }
}

pub fn solve_gcso_disjoint(ginst: &GeometricInstance, p: &Params, cfg: &GcsoConfig) -> Result<GcsoDisjointRun> {
    solve_gcso_disjoint_with(ginst, p, cfg, false)
}

/// As `solve_gcso_disjoint`; `verify` cross-checks the incremental counters
/// against a rebuild after every extraction.
pub fn solve_gcso_disjoint_with(ginst: &GeometricInstance, p: &Params, cfg: &GcsoConfig, verify: bool) -> Result<GcsoDisjointRun> {
    if ginst.frequency() > 1 {
        return Err(Error::Precondition(format!("rectangles overlap on the points (frequency {})", ginst.frequency())));
    }
    let budget = EpsBudget::gcso_disjoint(p.eps);
    let centers = set_centers(ginst, p.k);
    let radii = wspd_distances(ginst.points(), budget.wspd);
    let mut skips = Vec::new();
    let (found, probes) = bisect(&radii.values, |_, r| {
        let step = coreset_phase1(ginst, &centers, r, p.z)
            .and_then(|(reps, h0, zbar)| disjoint_after_phase1(ginst, &reps, h0, zbar, p.k, p.z, r, &budget, cfg, verify));
        match step {
            Ok(s) => Some(s),
            Err(e) => {
                skips.push((r, e));
                None
            }
        }
    });
    let (_, step) = found.ok_or_else(|| Error::Precondition("no radius admits a coreset solution".into()))?;
    let claim = gcso_disjoint_claim(p, budget.mwu);
    let solution = TriSolution::build(ginst, step.centers.clone(), step.outliers.clone(), claim);
    Ok(GcsoDisjointRun { solution, step, probes, skips })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disjoint_instance(n: usize, seed: u64) -> GeometricInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0)]).collect();
        // Vertical strips are disjoint.
        let rects = (0..8).map(|s| Rect::from_f64(&[5.0 * s as f64, -1.0], &[5.0 * s as f64 + 4.999, 41.0])).collect();
        let mut keep = pts;
        keep.retain(|p| (p[0] % 5.0) < 4.999);
        GeometricInstance::new(keep, rects).unwrap()
    }

    #[test]
    fn counters_match_rebuild() {
        let mut checks = 0;
        for seed in 0..5 {
            let g = disjoint_instance(120, seed);
            let budget = EpsBudget::gcso_disjoint(0.3);
            let centers = set_centers(&g, 2);
            for r in [6.0, 8.0, 12.0] {
                if let Ok((reps, _, zbar)) = coreset_phase1(&g, &centers, r, 2) {
                    let c = GeoPhase2 { ginst: &g, reps: &reps, zbar, r, eps: budget.bbd, verify: true }.run();
                    assert_eq!(c.mismatches, 0);
                    checks += c.checks;
                }
            }
        }
        assert!(checks > 0);
    }

    #[test]
    fn overlap_rejected() {
        let g = GeometricInstance::new(vec![vec![0.0]], vec![Rect::full(1), Rect::full(1)]).unwrap();
        assert!(solve_gcso_disjoint(&g, &Params::new(1, 1, 0.2).unwrap(), &GcsoConfig::default()).is_err());
    }
}
