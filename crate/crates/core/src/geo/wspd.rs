//! Candidate distances from a well-separated pair decomposition.
//!
//! Built on a fair-split tree. A node pair is emitted once the largest
//! distance between their bounding boxes is within `(1+eps)` of the
//! smallest; the emitted value is that largest distance, so it lies in
//! `[dist(p,q), (1+eps) dist(p,q)]` for every pair it represents.

use crate::instance::euclid;
use crate::metric::{CandidateRadii, RadiusSource};

struct FsNode {
    lo: Vec<f64>,
    hi: Vec<f64>,
    children: Option<(usize, usize)>,
}

struct FairSplit {
    nodes: Vec<FsNode>,
}

impl FairSplit {
    fn build(points: &[Vec<f64>]) -> FairSplit {
        let mut t = FairSplit { nodes: Vec::new() };
        let ids: Vec<usize> = (0..points.len()).collect();
        t.grow(points, ids);
        t
    }

    fn grow(&mut self, points: &[Vec<f64>], ids: Vec<usize>) -> usize {
        let d = points[0].len();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in &ids {
            for a in 0..d {
                lo[a] = lo[a].min(points[i][a]);
                hi[a] = hi[a].max(points[i][a]);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(FsNode { lo: lo.clone(), hi: hi.clone(), children: None });
        if lo == hi {
            return id;
        }
        let a = (0..d).max_by(|&x, &y| (hi[x] - lo[x]).total_cmp(&(hi[y] - lo[y])).then(y.cmp(&x))).unwrap();
        let mut mid = 0.5 * (lo[a] + hi[a]);
        if !(mid > lo[a]) {
            mid = hi[a];
        }
        let (l, r): (Vec<usize>, Vec<usize>) = ids.into_iter().partition(|&i| points[i][a] < mid);
        let lc = self.grow(points, l);
        let rc = self.grow(points, r);
        self.nodes[id].children = Some((lc, rc));
        id
    }

    fn diam(&self, u: usize) -> f64 {
        euclid(&self.nodes[u].lo, &self.nodes[u].hi)
    }

    fn box_dists(&self, u: usize, v: usize) -> (f64, f64) {
        let (a, b) = (&self.nodes[u], &self.nodes[v]);
        let mut near = 0.0;
        let mut far = 0.0;
        for i in 0..a.lo.len() {
            let g = (b.lo[i] - a.hi[i]).max(a.lo[i] - b.hi[i]).max(0.0);
            near += g * g;
            let f = (a.hi[i] - b.lo[i]).abs().max((b.hi[i] - a.lo[i]).abs());
            far += f * f;
        }
        (near.sqrt(), far.sqrt())
    }

    fn pairs(&self, u: usize, v: usize, eps: f64, out: &mut Vec<f64>) {
        let (near, far) = self.box_dists(u, v);
        if near > 0.0 && far <= (1.0 + eps) * near {
            out.push(far);
            return;
        }
        let (du, dv) = (self.diam(u), self.diam(v));
        let (split, other) = if du >= dv { (u, v) } else { (v, u) };
        match self.nodes[split].children {
            Some((a, b)) => {
                self.pairs(a, other, eps, out);
                self.pairs(b, other, eps, out);
            }
            None => {
                // Both are single locations at positive distance; only reachable
                // if the separation test failed on rounding.
                out.push(far);
            }
        }
    }
}

fn raw_pairs(points: &[Vec<f64>], eps: f64) -> Vec<f64> {
    if points.is_empty() {
        return Vec::new();
    }
    let t = FairSplit::build(points);
    let mut out = Vec::new();
    for u in 0..t.nodes.len() {
        if let Some((a, b)) = t.nodes[u].children {
            t.pairs(a, b, eps, &mut out);
        }
    }
    out
}

/// Sorted, deduplicated candidate radii with 0 prepended: every pairwise
/// distance `t` has a value in `[t, (1+eps) t]`.
pub fn wspd_distances(points: &[Vec<f64>], eps: f64) -> CandidateRadii {
    CandidateRadii::from_values(raw_pairs(points, eps), RadiusSource::Wspd)
}

/// Number of pairs a decomposition emits before deduplication.
pub fn wspd_pair_count(points: &[Vec<f64>], eps: f64) -> usize {
    raw_pairs(points, eps).len()
}

/// Worst relative error over all pairs: `max_pq min_j |L_j/dist - 1|`.
pub fn wspd_worst_error(points: &[Vec<f64>], list: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let t = euclid(&points[i], &points[j]);
            if t == 0.0 {
                continue;
            }
            let pos = list.partition_point(|&x| x < t);
            let mut best = f64::INFINITY;
            for q in [pos.wrapping_sub(1), pos] {
                if let Some(&l) = list.get(q) {
                    best = best.min((l / t - 1.0).abs());
                }
            }
            worst = worst.max(best);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let l = wspd_distances(&[vec![0.0, 0.0], vec![3.0, 4.0]], 0.1);
        assert_eq!(l.values, vec![0.0, 5.0]);
    }

    #[test]
    fn collinear_equally_spaced() {
        let pts: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let l = wspd_distances(&pts, 0.1);
        assert!(wspd_worst_error(&pts, &l.values) <= 0.1);
    }
}
