//! k-center over join results.

use crate::instance::{euclid, Rect};
use crate::geo::cube_complement;
use crate::search::bisect;

use super::distance::axis_gaps;
use super::join::{JoinResult, Query};

/// How `rel_cluster` searches for centers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClusterOracle {
    /// Farthest-point greedy, streaming the join once per center.
    #[default]
    Streaming,
    /// Threshold greedy in L-infinity: for each guessed radius, repeatedly
    /// pick a result outside the cubes around the current centers, found by
    /// counting over the cells of the cubes' complement.
    Cubes,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelClusters {
    pub centers: Vec<JoinResult>,
    /// Upper bound on the distance from any result to its nearest center.
    pub radius: f64,
}

/// Largest distance from a result to its nearest center, with the first
/// result attaining it.
pub fn farthest(q: &Query, centers: &[Vec<f64>]) -> (f64, Option<JoinResult>) {
    let mut best = (f64::NEG_INFINITY, None);
    q.counted(|_, _| true).for_each(|r| {
        let d = centers.iter().map(|c| euclid(c, &r.point)).fold(f64::INFINITY, f64::min);
        if d > best.0 {
            best = (d, Some(r));
        }
    });
    if best.1.is_none() {
        best.0 = 0.0;
    }
    best
}

/// At most `k` join results with a radius bounding every result's
/// distance to them. An empty join yields no centers and radius 0.
pub fn rel_cluster(q: &Query, k: usize, oracle: ClusterOracle) -> RelClusters {
    match oracle {
        ClusterOracle::Streaming => streaming_gonzalez(q, k),
        ClusterOracle::Cubes => cube_greedy(q, k),
    }
}

fn streaming_gonzalez(q: &Query, k: usize) -> RelClusters {
    let Some(first) = q.counted(|_, _| true).first() else {
        return RelClusters { centers: Vec::new(), radius: 0.0 };
    };
    let mut centers = vec![first];
    loop {
        let pts: Vec<Vec<f64>> = centers.iter().map(|c| c.point.clone()).collect();
        let (d, far) = farthest(q, &pts);
        if centers.len() >= k || d == 0.0 {
            return RelClusters { centers, radius: d };
        }
        centers.push(far.expect("a result attains a positive distance"));
    }
}

/// Greedy cover with closed L-infinity cubes of half-side `2r`; `None`
/// when more than `k` centers are needed.
fn cube_cover(q: &Query, k: usize, r: f64) -> Option<Vec<JoinResult>> {
    let mut centers = vec![q.counted(|_, _| true).first()?];
    loop {
        let cubes: Vec<Rect> = centers.iter().map(|c| Rect::cube(&c.point, 2.0 * r)).collect();
        let next = cube_complement(&cubes).iter().find_map(|cell| q.counted_rect(cell).first());
        match next {
            None => return Some(centers),
            Some(_) if centers.len() == k => return None,
            Some(p) => centers.push(p),
        }
    }
}

fn cube_greedy(q: &Query, k: usize) -> RelClusters {
    if q.counted(|_, _| true).total == 0 {
        return RelClusters { centers: Vec::new(), radius: 0.0 };
    }
    let gaps = axis_gaps(q);
    let (found, _) = bisect(&gaps, |_, r| cube_cover(q, k, r));
    let centers = found.expect("the largest gap covers everything with one cube").1;
    let pts: Vec<Vec<f64>> = centers.iter().map(|c| c.point.clone()).collect();
    let radius = farthest(q, &pts).0;
    RelClusters { centers, radius }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::brute_force_kcenter;
    use crate::relational::join::yannakakis_materialize;
    use crate::relational::schema::{Database, Relation};

    fn two_clusters() -> Database {
        // R(A) x S(A,B): results (a, b) for matching a.
        Database::new(
            vec!["A".into(), "B".into()],
            vec![
                Relation { name: "R".into(), attrs: vec![0], rows: vec![vec![0.0], vec![1.0], vec![100.0], vec![101.0]] },
                Relation {
                    name: "S".into(),
                    attrs: vec![0, 1],
                    rows: vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![100.0, 0.0], vec![101.0, 1.0], vec![0.0, 1.0]],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn k_at_least_results_gives_zero() {
        let db = two_clusters();
        let q = Query::new(&db).unwrap();
        for o in [ClusterOracle::Streaming, ClusterOracle::Cubes] {
            assert_eq!(rel_cluster(&q, 5, o).radius, 0.0);
        }
    }

    #[test]
    fn two_clusters_within_twice_opt() {
        let db = two_clusters();
        let q = Query::new(&db).unwrap();
        let pts: Vec<Vec<f64>> = yannakakis_materialize(&q, 100).unwrap().into_iter().map(|r| r.point).collect();
        let opt = brute_force_kcenter(pts.len(), |i, j| euclid(&pts[i], &pts[j]), 2);
        let c = rel_cluster(&q, 2, ClusterOracle::Streaming);
        assert_eq!(c.centers.len(), 2);
        assert!(c.radius <= 2.0 * opt);
        let actual = farthest(&q, &c.centers.iter().map(|c| c.point.clone()).collect::<Vec<_>>()).0;
        assert!(actual <= c.radius);
        let cubes = rel_cluster(&q, 2, ClusterOracle::Cubes);
        assert!(cubes.radius <= 2.0 * 2f64.sqrt() * opt);
    }
}
