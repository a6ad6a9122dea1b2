//! k-center over a join where up to z tuples of one relation may be
//! discarded.
//!
//! Each tuple of the outlier relation selects a degenerate rectangle, and
//! these rectangles are pairwise disjoint, so the problem is a disjoint
//! geometric set-outlier instance. The per-set clustering is replaced by
//! the join clustering oracle run on each tuple's slice of the join; the
//! rest is the geometric coreset pipeline on the oracle centers.

use crate::constants::{rcto1_cost_factor, EpsBudget};
use crate::cso_disjoint::Skip;
use crate::cso_general::center_cap;
use crate::error::Result;
use crate::gcso::GcsoConfig;
use crate::gcso_disjoint::{disjoint_after_phase1, GeoDisjointStep};
use crate::instance::{Claim, GeometricInstance, Params, Rect};
use crate::relational::distance::{linf_kth_distance, result_pairs};
use crate::relational::{rel_cluster, ClusterOracle, JoinResult, Query, RelClusters, TupleId};
use crate::search::{bisect_by, Probe};

use super::{points_of, validate_tuple_solution, wipe_out, TupleSolution};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rcto1Config {
    /// Relation whose tuples may be discarded.
    pub relation: usize,
    pub oracle: ClusterOracle,
    pub gcso: GcsoConfig,
}

impl Default for Rcto1Config {
    fn default() -> Self {
        Rcto1Config { relation: 0, oracle: ClusterOracle::default(), gcso: GcsoConfig::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Rcto1Run {
    pub solution: TupleSolution,
    pub r: f64,
    pub probes: Vec<Probe>,
    pub skips: Vec<(f64, Skip)>,
    pub claim: Claim,
}

pub fn rcto1_claim(p: &Params, d: usize) -> Claim {
    let b = EpsBudget::gcso_disjoint(p.eps);
    Claim { centers: center_cap(p.k, b.mwu) / p.k as f64, outliers: 2.0, cost: rcto1_cost_factor(p.eps, d) }
}

/// Oracle centers of every tuple's slice of the join.
pub fn tuple_clusters(q: &Query, rel: usize, k: usize, oracle: ClusterOracle) -> Vec<(TupleId, RelClusters)> {
    (0..q.db().relation(rel).rows.len())
        .filter(|&row| q.mask()[rel][row])
        .map(|row| {
            let mut mask = q.mask().clone();
            mask[rel].iter_mut().enumerate().for_each(|(i, m)| *m = *m && i == row);
            (TupleId { rel, row }, rel_cluster(&q.restrict(mask), k, oracle))
        })
        .collect()
}

struct Attempt {
    outliers: Vec<TupleId>,
    centers: Vec<JoinResult>,
}

/// One radius guess: tuples whose slice needs more than `(2+eps) r` become
/// outliers up front, the rest go through the coreset pipeline.
fn attempt(q: &Query, clusters: &[(TupleId, RelClusters)], p: &Params, r: f64, cfg: &Rcto1Config) -> std::result::Result<Attempt, Skip> {
    let budget = EpsBudget::gcso_disjoint(p.eps);
    let mut h0 = Vec::new();
    let mut points: Vec<JoinResult> = Vec::new();
    let mut reps: Vec<Vec<usize>> = Vec::with_capacity(clusters.len());
    for (j, (_, c)) in clusters.iter().enumerate() {
        if c.radius > (2.0 + p.eps) * r {
            h0.push(j);
            reps.push(Vec::new());
        } else {
            reps.push((points.len()..points.len() + c.centers.len()).collect());
            points.extend(c.centers.iter().cloned());
        }
    }
    if h0.len() > p.z {
        return Err(Skip::OutlierBudget);
    }
    let zbar = p.z - h0.len();
    if points.is_empty() {
        return Ok(Attempt { outliers: h0.iter().map(|&j| clusters[j].0).collect(), centers: Vec::new() });
    }
    let rects: Vec<Rect> = clusters.iter().map(|(t, _)| q.db().tuple_rect(*t)).collect();
    let ginst = GeometricInstance::new(points_of(&points), rects).map_err(|_| Skip::Relaxation)?;
    let step: GeoDisjointStep = disjoint_after_phase1(&ginst, &reps, h0, zbar, p.k, p.z, r, &budget, &cfg.gcso, false)?;
    Ok(Attempt {
        outliers: step.outliers.iter().map(|&j| clusters[j].0).collect(),
        centers: step.centers.iter().map(|&i| points[i].clone()).collect(),
    })
}

pub fn solve_rcto1(q: &Query, p: &Params, cfg: &Rcto1Config) -> Result<Rcto1Run> {
    let claim = rcto1_claim(p, q.dim());
    if let Some(all) = wipe_out(q, p.z, Some(cfg.relation)) {
        let solution = TupleSolution { centers: Vec::new(), outliers: all, radius: 0.0 };
        return Ok(Rcto1Run { solution, r: 0.0, probes: Vec::new(), skips: Vec::new(), claim });
    }
    let clusters = tuple_clusters(q, cfg.relation, p.k, cfg.oracle);
    let sqrt_d = (q.dim() as f64).sqrt();
    let pairs = result_pairs(q);
    // Candidate 0, then sqrt(d) times every L-infinity distance by rank.
    let len = 1 + pairs as usize;
    let value = |i: usize| if i == 0 { 0.0 } else { sqrt_d * linf_kth_distance(q, i as u128).expect("rank in range") };
    let mut skips = Vec::new();
    let (found, probes) = bisect_by(len, value, |_, r| match attempt(q, &clusters, p, r, cfg) {
        Ok(a) => Some(a),
        Err(s) => {
            skips.push((r, s));
            None
        }
    });
    let (idx, best) = found.ok_or_else(|| crate::error::Error::Precondition("no radius admits a solution".into()))?;
    let r = probes.iter().find(|pr| pr.index == idx).map_or(0.0, |pr| pr.value);
    let centers = points_of(&best.centers);
    let report = validate_tuple_solution(q, &centers, &best.outliers);
    let mut outliers = best.outliers;
    outliers.sort_unstable();
    Ok(Rcto1Run { solution: TupleSolution { centers, outliers, radius: report.radius }, r, probes, skips, claim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::oracle::rcto1_opt;
    use crate::relational::{Database, Relation};

    fn db(spread_tuple: bool) -> Database {
        // R1(A) joins S(A,B). A=0 and A=1 give tight clusters; A=2 fans
        // out over a wide range when `spread_tuple`.
        let mut s = vec![vec![0.0, 0.0], vec![0.0, 0.5], vec![1.0, 10.0], vec![1.0, 10.5]];
        if spread_tuple {
            s.extend([vec![2.0, -40.0], vec![2.0, 60.0]]);
        }
        let r1 = if spread_tuple { vec![vec![0.0], vec![1.0], vec![2.0]] } else { vec![vec![0.0], vec![1.0]] };
        Database::new(
            vec!["A".into(), "B".into()],
            vec![Relation { name: "R1".into(), attrs: vec![0], rows: r1 }, Relation { name: "S".into(), attrs: vec![0, 1], rows: s }],
        )
        .unwrap()
    }

    #[test]
    fn spread_tuple_is_discarded() {
        let d = db(true);
        let q = Query::new(&d).unwrap();
        let p = Params::new(1, 1, 0.2).unwrap();
        let run = solve_rcto1(&q, &p, &Rcto1Config::default()).unwrap();
        let rep = validate_tuple_solution(&q, &run.solution.centers, &run.solution.outliers);
        assert!(rep.centers_valid);
        assert!(rep.num_outliers <= 2);
        let (opt, _) = rcto1_opt(&q, 1, 1, 1_000_000).unwrap();
        assert!(rep.radius <= run.claim.cost * opt, "{} vs {}", rep.radius, opt);
        assert!(run.solution.outliers.iter().all(|t| t.rel == 0));
    }

    #[test]
    fn tight_tuples_need_no_outliers() {
        let d = db(false);
        let q = Query::new(&d).unwrap();
        let p = Params::new(2, 1, 0.2).unwrap();
        let run = solve_rcto1(&q, &p, &Rcto1Config::default()).unwrap();
        let rep = validate_tuple_solution(&q, &run.solution.centers, &run.solution.outliers);
        assert!(rep.centers_valid);
        let (opt, _) = rcto1_opt(&q, 2, 1, 1_000_000).unwrap();
        assert!(rep.radius <= run.claim.cost * opt);
    }
}
