//! Relational k-center with outliers: discarded join results, discarded
//! tuples of one relation, and discarded tuples of any relation.

pub mod rcro;
pub mod rcto;
pub mod rcto1;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::instance::euclid;
use crate::relational::schema::key_bits;
use crate::relational::{JoinResult, Query, TupleId};

pub use rcro::{solve_rcro, RcroConfig, RcroRun};
pub use rcto::{replay_witnesses, solve_rcto, GuessTrace, PartitionTrial, RctoConfig, RctoRun, Witness};
pub use rcto1::{solve_rcto1, Rcto1Config, Rcto1Run};

/// Centers and discarded tuples of a tuple-outlier solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleSolution {
    pub centers: Vec<Vec<f64>>,
    pub outliers: Vec<TupleId>,
    pub radius: f64,
}

/// Independent check of a tuple-outlier solution.
#[derive(Clone, Debug, PartialEq)]
pub struct TupleReport {
    /// Every center is a result of the join without the outlier tuples.
    pub centers_valid: bool,
    pub radius: f64,
    pub num_centers: usize,
    pub num_outliers: usize,
}

fn nearest(centers: &[Vec<f64>], p: &[f64]) -> f64 {
    centers.iter().map(|c| euclid(c, p)).fold(f64::INFINITY, f64::min)
}

/// Recomputes the radius over the join without `outliers` and checks
/// center membership with point-rectangle counts.
pub fn validate_tuple_solution(q: &Query, centers: &[Vec<f64>], outliers: &[TupleId]) -> TupleReport {
    let mut t: Vec<TupleId> = outliers.to_vec();
    t.sort_unstable();
    t.dedup();
    let rest = q.without(&t);
    let mut radius: f64 = 0.0;
    rest.counted(|_, _| true).for_each(|r| radius = radius.max(nearest(centers, &r.point)));
    TupleReport {
        centers_valid: centers.iter().all(|c| rest.contains(c)),
        radius,
        num_centers: centers.len(),
        num_outliers: t.len(),
    }
}

/// Independent check of a result-outlier solution.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultReport {
    pub centers_in_join: bool,
    pub outliers_in_join: bool,
    pub disjoint: bool,
    pub radius: f64,
    pub num_centers: usize,
    pub num_outliers: usize,
}

impl ResultReport {
    pub fn valid(&self) -> bool {
        self.centers_in_join && self.outliers_in_join && self.disjoint
    }
}

fn point_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|&v| key_bits(v)).collect()
}

pub fn validate_result_solution(q: &Query, centers: &[Vec<f64>], outliers: &[Vec<f64>]) -> ResultReport {
    let out: HashSet<Vec<u64>> = outliers.iter().map(|p| point_key(p)).collect();
    let mut radius: f64 = 0.0;
    q.counted(|_, _| true).for_each(|r| {
        if !out.contains(&point_key(&r.point)) {
            radius = radius.max(nearest(centers, &r.point));
        }
    });
    ResultReport {
        centers_in_join: centers.iter().all(|c| q.contains(c)),
        outliers_in_join: outliers.iter().all(|c| q.contains(c)),
        disjoint: centers.iter().all(|c| !out.contains(&point_key(c))),
        radius,
        num_centers: centers.len(),
        num_outliers: out.len(),
    }
}

pub(crate) fn points_of(rs: &[JoinResult]) -> Vec<Vec<f64>> {
    rs.iter().map(|r| r.point.clone()).collect()
}

/// The smallest relation under the mask, if removing all of it fits the
/// budget: an empty join is a radius-0 solution.
pub(crate) fn wipe_out(q: &Query, z: usize, only: Option<usize>) -> Option<Vec<TupleId>> {
    let sizes = q.mask().iter().enumerate().filter(|(rel, _)| only.is_none_or(|o| o == *rel)).map(|(rel, m)| {
        let rows: Vec<TupleId> = m.iter().enumerate().filter(|(_, &a)| a).map(|(row, _)| TupleId { rel, row }).collect();
        rows
    });
    sizes.min_by_key(Vec::len).filter(|t| t.len() <= z)
}
