//! Exhaustive references for small databases.

use crate::error::{Error, Result};
use crate::instance::euclid;
use crate::metric::{brute_force_kcenter, brute_force_kcenter_outliers, for_each_subset, subsets_upto};

use super::join::{yannakakis_materialize, JoinResult, Query};
use super::schema::{key_bits, Database, Mask, TupleId};

/// Join by trying every combination of allowed rows.
pub fn nested_loop_join(db: &Database, mask: &Mask) -> Vec<JoinResult> {
    let g = db.relations().len();
    let mut out = Vec::new();
    let mut rows = vec![0usize; g];
    let mut point = vec![f64::NAN; db.dim()];
    fn rec(db: &Database, mask: &Mask, i: usize, rows: &mut Vec<usize>, point: &mut Vec<f64>, out: &mut Vec<JoinResult>) {
        if i == rows.len() {
            out.push(JoinResult { point: point.clone(), rows: rows.clone() });
            return;
        }
        let rel = db.relation(i);
        for (r, row) in rel.rows.iter().enumerate() {
            if !mask[i][r] {
                continue;
            }
            let saved: Vec<f64> = rel.attrs.iter().map(|&a| point[a]).collect();
            let fits = rel.attrs.iter().zip(row).all(|(&a, &v)| point[a].is_nan() || key_bits(point[a]) == key_bits(v));
            if fits {
                for (&a, &v) in rel.attrs.iter().zip(row) {
                    point[a] = v;
                }
                rows[i] = r;
                rec(db, mask, i + 1, rows, point, out);
            }
            for (&a, v) in rel.attrs.iter().zip(saved) {
                point[a] = v;
            }
        }
    }
    rec(db, mask, 0, &mut rows, &mut point, &mut out);
    out
}

fn points(q: &Query, cap: usize) -> Result<Vec<Vec<f64>>> {
    Ok(yannakakis_materialize(q, cap)?.into_iter().map(|r| r.point).collect())
}

fn kcenter_cost(pts: &[Vec<f64>], k: usize) -> f64 {
    if pts.is_empty() {
        0.0
    } else {
        brute_force_kcenter(pts.len(), |i, j| euclid(&pts[i], &pts[j]), k)
    }
}

fn check_cap(work: u64, cap: u64) -> Result<()> {
    if work > cap {
        return Err(Error::CapExceeded(format!("exhaustive search needs {work} steps, cap is {cap}")));
    }
    Ok(())
}

/// Optimal radius when any `z` join results may be discarded.
pub fn rcro_opt(q: &Query, k: usize, z: usize, cap: u64) -> Result<f64> {
    let pts = points(q, cap as usize)?;
    check_cap(subsets_upto(pts.len(), k), cap)?;
    Ok(brute_force_kcenter_outliers(pts.len(), |i, j| euclid(&pts[i], &pts[j]), k, z))
}

/// Optimal radius over removals of at most `z` tuples drawn from
/// `candidates`, with centers from the remaining join.
pub fn tuple_outlier_opt(q: &Query, candidates: &[TupleId], k: usize, z: usize, cap: u64) -> Result<(f64, Vec<TupleId>)> {
    let pts = points(q, cap as usize)?;
    let work = subsets_upto(candidates.len(), z).saturating_mul(subsets_upto(pts.len(), k));
    check_cap(work, cap)?;
    let mut best = (f64::INFINITY, Vec::new());
    let mut failure = None;
    for_each_subset(candidates.len(), z.min(candidates.len()), |ts| {
        if failure.is_some() {
            return;
        }
        let removed: Vec<TupleId> = ts.iter().map(|&i| candidates[i]).collect();
        match points(&q.without(&removed), cap as usize) {
            Ok(rest) => {
                let c = kcenter_cost(&rest, k);
                if c < best.0 {
                    best = (c, removed);
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// Optimum when outliers come from the first relation only.
pub fn rcto1_opt(q: &Query, k: usize, z: usize, cap: u64) -> Result<(f64, Vec<TupleId>)> {
    let cands: Vec<TupleId> = (0..q.db().relation(0).rows.len()).map(|row| TupleId { rel: 0, row }).collect();
    tuple_outlier_opt(q, &cands, k, z, cap)
}

/// Optimum when outliers may be any input tuples.
pub fn rcto_opt(q: &Query, k: usize, z: usize, cap: u64) -> Result<(f64, Vec<TupleId>)> {
    let cands: Vec<TupleId> = q.db().tuple_ids().collect();
    tuple_outlier_opt(q, &cands, k, z, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::join::yannakakis_count;
    use crate::relational::schema::Relation;

    #[test]
    fn nested_loop_matches_count() {
        let db = Database::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                Relation { name: "R".into(), attrs: vec![0, 1], rows: vec![vec![1.0, 2.0], vec![2.0, 2.0], vec![3.0, 4.0]] },
                Relation { name: "S".into(), attrs: vec![1, 2], rows: vec![vec![2.0, 0.0], vec![2.0, 1.0], vec![5.0, 5.0]] },
            ],
        )
        .unwrap();
        let q = Query::new(&db).unwrap();
        assert_eq!(nested_loop_join(&db, &db.full_mask()).len(), 4);
        assert_eq!(yannakakis_count(&q), 4);
    }

    #[test]
    fn far_tuple_is_removed() {
        // R(A) joins S(A,B); the tuple A=9 fans out to a distant result.
        let db = Database::new(
            vec!["A".into(), "B".into()],
            vec![
                Relation { name: "R".into(), attrs: vec![0], rows: vec![vec![0.0], vec![1.0], vec![9.0]] },
                Relation { name: "S".into(), attrs: vec![0, 1], rows: vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![9.0, 50.0]] },
            ],
        )
        .unwrap();
        let q = Query::new(&db).unwrap();
        let (r, t) = rcto1_opt(&q, 1, 1, 1_000_000).unwrap();
        assert_eq!(r, 2f64.sqrt());
        assert_eq!(t, vec![TupleId { rel: 0, row: 2 }]);
        assert_eq!(rcro_opt(&q, 1, 1, 1_000_000).unwrap(), 2f64.sqrt());
    }
}
