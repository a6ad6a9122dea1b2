//! Set-outlier k-center for points in R^d with rectangle outlier sets.
//!
//! The covering LP is solved by the MWU engine without ever writing the
//! matrix down: ball rows come from BBD canonical nodes and rectangle
//! columns from range-tree canonical nodes, so every coefficient and row
//! value is a sum of per-node accumulators.

use crate::constants::EpsBudget;
use crate::cso_general::{threshold_sets, FractionalAssignment};
use crate::error::{Error, Result};
use crate::geo::{wspd_distances, ActiveSet, BbdTree, RangeTree};
use crate::instance::{Claim, GeometricInstance, Params, Rect, SetSystem, TriSolution};
use crate::mwu::{mwu_solve, CoverageSystem, DenseSystem, MwuConfig};
use crate::search::{bisect, Probe};

/// Radius-independent indexes over one point set and rectangle family.
#[derive(Clone, Debug)]
pub struct GeoIndex {
    pub points: Vec<Vec<f64>>,
    pub bbd: BbdTree,
    pub rt: RangeTree,
    /// Range-tree canonical nodes of each rectangle.
    pub rect_nodes: Vec<Vec<usize>>,
    /// Last-level range-tree nodes holding each point.
    pub paths: Vec<Vec<usize>>,
}

impl GeoIndex {
    pub fn build(points: &[Vec<f64>], rects: &[Rect]) -> Result<GeoIndex> {
        if points.is_empty() {
            return Err(Error::Precondition("no points to index".into()));
        }
        let bbd = BbdTree::build(points);
        let rt = RangeTree::build(points);
        let rect_nodes = rects.iter().map(|r| rt.query(r)).collect::<Result<Vec<_>>>()?;
        let paths = (0..points.len()).map(|i| rt.last_level_path(i)).collect();
        Ok(GeoIndex { points: points.to_vec(), bbd, rt, rect_nodes, paths })
    }

    pub fn num_rects(&self) -> usize {
        self.rect_nodes.len()
    }
}

/// Tree-backed coverage system at one radius.
#[derive(Clone, Debug)]
pub struct GeoSystem<'a> {
    pub index: &'a GeoIndex,
    /// Canonical BBD nodes of each point's ball; their points form `S_i`.
    pub balls: Vec<Vec<usize>>,
}

impl<'a> GeoSystem<'a> {
    pub fn new(index: &'a GeoIndex, r: f64, eps_bbd: f64) -> GeoSystem<'a> {
        let balls = index.points.iter().map(|p| index.bbd.ball_query(p, r, eps_bbd)).collect();
        GeoSystem { index, balls }
    }

    /// The same system with `A` written out, sharing the ball sets.
    pub fn to_dense(&self) -> DenseSystem {
        let ix = self.index;
        let balls = self.balls.iter().map(|c| ix.bbd.collect(c)).collect();
        let mut member = vec![Vec::new(); ix.points.len()];
        for j in 0..ix.num_rects() {
            for &u in &ix.rect_nodes[j] {
                for &i in ix.rt.points_of(u) {
                    member[i].push(j);
                }
            }
        }
        member.iter_mut().for_each(|m| m.sort_unstable());
        DenseSystem { nx: ix.points.len(), ny: ix.num_rects(), balls, member }
    }
}

impl CoverageSystem for GeoSystem<'_> {
    fn num_rows(&self) -> usize {
        self.index.points.len()
    }

    fn num_x(&self) -> usize {
        self.index.points.len()
    }

    fn num_y(&self) -> usize {
        self.index.num_rects()
    }

    fn coefficients(&mut self, sigma: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let ix = self.index;
        let mut us = ix.bbd.slots(0.0);
        for (i, c) in self.balls.iter().enumerate() {
            for &u in c {
                us[u] += sigma[i];
            }
        }
        let w = (0..ix.points.len()).map(|l| ix.bbd.path(l).map(|u| us[u]).sum()).collect();
        let mut vs = ix.rt.slots(0.0);
        for (i, path) in ix.paths.iter().enumerate() {
            for &u in path {
                vs[u] += sigma[i];
            }
        }
        let tau = ix.rect_nodes.iter().map(|nodes| nodes.iter().map(|&u| vs[u]).sum()).collect();
        (w, tau)
    }

    fn row_values(&mut self, xs: &[usize], ys: &[usize]) -> Vec<f64> {
        let mut x = vec![0.0; self.num_x()];
        let mut y = vec![0.0; self.num_y()];
        xs.iter().for_each(|&l| x[l] = 1.0);
        ys.iter().for_each(|&j| y[j] = 1.0);
        self.row_values_frac(&x, &y)
    }

    fn row_values_frac(&mut self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let ix = self.index;
        let mut uw = ix.bbd.slots(0.0);
        for (l, &xl) in x.iter().enumerate() {
            if xl != 0.0 {
                for u in ix.bbd.path(l) {
                    uw[u] += xl;
                }
            }
        }
        let mut vw = ix.rt.slots(0.0);
        for (j, &yj) in y.iter().enumerate() {
            if yj != 0.0 {
                for &u in &ix.rect_nodes[j] {
                    vw[u] += yj;
                }
            }
        }
        (0..ix.points.len())
            .map(|i| self.balls[i].iter().map(|&u| uw[u]).sum::<f64>() + ix.paths[i].iter().map(|&u| vw[u]).sum::<f64>())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GcsoConfig {
    pub mwu: MwuConfig,
}

impl Default for GcsoConfig {
    fn default() -> Self {
        GcsoConfig { mwu: MwuConfig::default() }
    }
}

/// Solves the covering LP at radius `r` through the trees.
pub fn mwu_solve_geo(index: &GeoIndex, r: f64, k: usize, z: usize, budget: &EpsBudget, cfg: &MwuConfig) -> Option<FractionalAssignment> {
    let mut sys = GeoSystem::new(index, r, budget.bbd);
    let s = mwu_solve(&mut sys, k, z, budget.mwu, cfg).feasible()?;
    Some(FractionalAssignment { x: s.x, y: s.y, iterations: s.iterations, budget: s.budget, min_coverage: s.min_coverage })
}

/// Points outside every chosen rectangle, read off the range-tree nodes
/// each rectangle is listed at.
pub fn active_points(index: &GeoIndex, chosen: &[usize]) -> Vec<usize> {
    let mut listed = index.rt.slots(false);
    for &j in chosen {
        for &u in &index.rect_nodes[j] {
            listed[u] = true;
        }
    }
    (0..index.points.len()).filter(|&i| !index.paths[i].iter().any(|&u| listed[u])).collect()
}

/// Greedy peeling of `act` with BBD balls of radius `2(1+eps) r`.
/// Centers end up pairwise farther than `2(1+eps) r`; every peeled point
/// is within `2(1+eps)^2 r` of its center.
pub fn peel_geometric(points: &[Vec<f64>], act: &[usize], r: f64, eps: f64) -> Vec<usize> {
    if act.is_empty() {
        return Vec::new();
    }
    let coords: Vec<Vec<f64>> = act.iter().map(|&i| points[i].clone()).collect();
    let tree = BbdTree::build(&coords);
    let mut live = ActiveSet::new(&tree, &vec![1; coords.len()]);
    let mut centers = Vec::new();
    while live.root_alive() {
        let c = live.rep[tree.root()];
        centers.push(act[c]);
        let nodes = tree.ball_query_active(&coords[c], 2.0 * (1.0 + eps) * r, eps, &live);
        live.deactivate(&tree, &nodes);
    }
    centers
}

/// Rounds a fractional solution: rectangles with mass at least `1/(2f)`
/// become outliers and the remaining points are peeled.
pub fn round_geometric(index: &GeoIndex, frac: &FractionalAssignment, r: f64, eps_bbd: f64, f: usize) -> (Vec<usize>, Vec<usize>) {
    let chosen = threshold_sets(&frac.y, f);
    let act = active_points(index, &chosen);
    (peel_geometric(&index.points, &act, r, eps_bbd), chosen)
}

#[derive(Clone, Debug)]
pub struct GcsoRun {
    pub solution: TriSolution,
    pub r: f64,
    pub frac: FractionalAssignment,
    pub probes: Vec<Probe>,
}

/// Claimed factors for the geometric solver at slack `eps`.
pub fn gcso_claim(eps: f64, f: usize) -> Claim {
    Claim { centers: 2.0 + eps, outliers: (2 * f) as f64, cost: (2.0 + eps) * (1.0 + eps).powi(2) }
}

pub fn solve_gcso(ginst: &GeometricInstance, p: &Params, cfg: &GcsoConfig) -> Result<GcsoRun> {
    let budget = EpsBudget::gcso(p.eps);
    let index = GeoIndex::build(ginst.points(), ginst.rects())?;
    let f = ginst.frequency();
    let radii = wspd_distances(ginst.points(), budget.wspd);
    let (found, probes) = bisect(&radii.values, |_, r| mwu_solve_geo(&index, r, p.k, p.z, &budget, &cfg.mwu).map(|fr| (r, fr)));
    let (_, (r, frac)) = found.ok_or_else(|| Error::Precondition("relaxation infeasible at the largest candidate".into()))?;
    let (centers, outliers) = round_geometric(&index, &frac, r, budget.bbd, f);
    let solution = TriSolution::build(ginst, centers, outliers, gcso_claim(p.eps, f));
    Ok(GcsoRun { solution, r, frac, probes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_rects(points: &[Vec<f64>]) -> Vec<Rect> {
        points.iter().map(|p| Rect::from_f64(p, p)).collect()
    }

    #[test]
    fn single_point_single_rect() {
        let g = GeometricInstance::new(vec![vec![1.0, 1.0]], vec![Rect::full(2)]).unwrap();
        let run = solve_gcso(&g, &Params::new(1, 1, 0.2).unwrap(), &GcsoConfig::default()).unwrap();
        assert_eq!(run.solution.radius, 0.0);
    }

    #[test]
    fn uniform_mass_in_one_rect() {
        let pts = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let ix = GeoIndex::build(&pts, &[Rect::from_f64(&[-1.0], &[4.0])]).unwrap();
        let mut s = GeoSystem::new(&ix, 0.5, 0.1);
        let (_, tau) = s.coefficients(&[0.25; 4]);
        assert_eq!(tau, vec![1.0]);
    }

    #[test]
    fn tree_matches_dense() {
        let pts: Vec<Vec<f64>> = (0..20).map(|i| vec![(i * 7 % 13) as f64, (i * 3 % 5) as f64]).collect();
        let mut rects = unit_rects(&pts);
        rects.push(Rect::from_f64(&[0.0, 0.0], &[6.0, 2.0]));
        let ix = GeoIndex::build(&pts, &rects).unwrap();
        let mut t = GeoSystem::new(&ix, 3.0, 0.25);
        let mut d = t.to_dense();
        let sigma: Vec<f64> = (0..20).map(|i| ((i * 37 % 101) + 1) as f64 / 1024.0).collect();
        assert_eq!(t.coefficients(&sigma), d.coefficients(&sigma));
        let xs = [1, 4, 9];
        let ys = [0, 20];
        assert_eq!(t.row_values(&xs, &ys), d.row_values(&xs, &ys));
    }

    #[test]
    fn everything_in_one_chosen_rect() {
        let pts = vec![vec![0.0], vec![5.0]];
        let ix = GeoIndex::build(&pts, &[Rect::full(1)]).unwrap();
        let frac = FractionalAssignment { x: vec![0.0; 2], y: vec![1.0], iterations: 1, budget: 1, min_coverage: 1.0 };
        let (c, h) = round_geometric(&ix, &frac, 0.0, 0.1, 1);
        assert!(c.is_empty());
        assert_eq!(h, vec![0]);
    }

    #[test]
    fn junk_rectangle_is_dropped() {
        let mut pts = Vec::new();
        for c in [0.0, 100.0] {
            for i in 0..5 {
                pts.push(vec![c + i as f64 * 0.1, 0.0]);
            }
        }
        pts.push(vec![50.0, 50.0]);
        pts.push(vec![-50.0, 50.0]);
        let rects = vec![
            Rect::from_f64(&[-1.0, -1.0], &[1.0, 1.0]),
            Rect::from_f64(&[99.0, -1.0], &[101.0, 1.0]),
            Rect::from_f64(&[-51.0, 49.0], &[51.0, 51.0]),
        ];
        let g = GeometricInstance::new(pts, rects).unwrap();
        let run = solve_gcso(&g, &Params::new(2, 1, 0.2).unwrap(), &GcsoConfig::default()).unwrap();
        assert_eq!(run.solution.outliers, vec![2]);
        assert!(run.solution.radius <= 0.4 * 2.3);
    }
}
