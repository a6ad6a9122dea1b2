//! Selection of the l-th smallest L-infinity distance among join results
//! without materializing the join.

use super::join::Query;
use crate::error::{Error, Result};
use crate::metric::{CandidateRadii, RadiusSource};

/// Every L-infinity distance between two results is a gap between two
/// domain values of one attribute; this is the sorted union of those gaps.
pub fn axis_gaps(q: &Query) -> Vec<f64> {
    let mut gaps = vec![0.0];
    for a in 0..q.dim() {
        let dom = q.domain(a);
        for (i, &x) in dom.iter().enumerate() {
            for &y in &dom[i + 1..] {
                gaps.push((y - x).abs());
            }
        }
    }
    gaps.sort_by(f64::total_cmp);
    gaps.dedup();
    gaps
}

/// Unordered pairs of distinct results at L-infinity distance at most `r`:
/// every result counts the results in its closed cube, itself included.
pub fn pairs_within(q: &Query, n: u128, r: f64) -> u128 {
    let all = q.counted(|_, _| true);
    let mut sum: u128 = 0;
    all.for_each(|p| {
        sum += q.counted(|a, v| (v - p.point[a]).abs() <= r).total;
    });
    (sum - n) / 2
}

/// The `ell`-th smallest L-infinity distance over unordered pairs of
/// distinct results, `ell` counted from 1.
pub fn linf_kth_distance(q: &Query, ell: u128) -> Result<f64> {
    let n = q.counted(|_, _| true).total;
    if n < 2 {
        return Err(Error::Precondition(format!("need at least two join results, have {n}")));
    }
    let pairs = n * (n - 1) / 2;
    if ell == 0 || ell > pairs {
        return Err(Error::Precondition(format!("rank {ell} outside 1..={pairs}")));
    }
    let gaps = axis_gaps(q);
    // Smallest gap whose pair count reaches ell; the largest gap covers all pairs.
    let (mut lo, mut hi) = (0usize, gaps.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pairs_within(q, n, gaps[mid]) >= ell {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(gaps[lo])
}

/// Number of unordered result pairs, zero below two results.
pub fn result_pairs(q: &Query) -> u128 {
    let n = q.counted(|_, _| true).total;
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

/// The distinct L-infinity distances of the join, 0 included, read off by
/// rank selection. Each distinct value is located with one selection at
/// the rank right after the previous value's last occurrence.
pub fn linf_candidates(q: &Query) -> CandidateRadii {
    let n = q.counted(|_, _| true).total;
    let mut values = vec![0.0];
    let total = result_pairs(q);
    let mut ell: u128 = 1;
    while ell <= total {
        let v = linf_kth_distance(q, ell).expect("rank in range");
        values.push(v);
        ell = pairs_within(q, n, v) + 1;
    }
    CandidateRadii::from_values(values, RadiusSource::LinfRelational)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::linf;
    use crate::relational::join::yannakakis_materialize;
    use crate::relational::schema::{Database, Relation};

    fn db(rows_r: Vec<Vec<f64>>, rows_s: Vec<Vec<f64>>) -> Database {
        Database::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                Relation { name: "R".into(), attrs: vec![0, 1], rows: rows_r },
                Relation { name: "S".into(), attrs: vec![1, 2], rows: rows_s },
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_results_at_distance_three() {
        let d = db(vec![vec![0.0, 1.0], vec![3.0, 1.0]], vec![vec![1.0, 0.0]]);
        let q = Query::new(&d).unwrap();
        assert_eq!(linf_kth_distance(&q, 1).unwrap(), 3.0);
        assert!(linf_kth_distance(&q, 2).is_err());
    }

    #[test]
    fn matches_materialized_pairs() {
        let d = db(
            vec![vec![0.0, 1.0], vec![3.0, 1.0], vec![1.5, 2.0], vec![0.0, 2.0]],
            vec![vec![1.0, 0.0], vec![1.0, 0.5], vec![2.0, 7.0], vec![2.0, 0.0]],
        );
        let q = Query::new(&d).unwrap();
        let pts: Vec<Vec<f64>> = yannakakis_materialize(&q, 100).unwrap().into_iter().map(|r| r.point).collect();
        let mut all = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                all.push(linf(&pts[i], &pts[j]));
            }
        }
        all.sort_by(f64::total_cmp);
        for (ell, &want) in all.iter().enumerate() {
            assert_eq!(linf_kth_distance(&q, ell as u128 + 1).unwrap(), want);
        }
        let mut distinct = all.clone();
        distinct.insert(0, 0.0);
        distinct.dedup();
        assert_eq!(linf_candidates(&q).values, distinct);
    }
}
