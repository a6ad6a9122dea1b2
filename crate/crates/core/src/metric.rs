//! Baselines and exact oracles over general metrics: Gonzalez k-center,
//! exhaustive optimum, candidate radii and the set-cover reduction.

use crate::error::{Error, Result};
use crate::instance::{excluded_mask, Claim, GeneralInstance, Metric, SetSystem, TriSolution};

/// Farthest-first traversal starting from `elements[0]`.
///
/// Returns at most `k` centers and the covering radius of `elements`. Stops
/// early once every element coincides with a center.
pub fn gonzalez_kcenter<F>(elements: &[usize], dist: F, k: usize) -> (Vec<usize>, f64)
where
    F: Fn(usize, usize) -> f64,
{
    if elements.is_empty() || k == 0 {
        return (Vec::new(), if elements.is_empty() { 0.0 } else { f64::INFINITY });
    }
    let mut centers = vec![elements[0]];
    let mut near: Vec<f64> = elements.iter().map(|&e| dist(e, elements[0])).collect();
    loop {
        let (far, radius) = farthest(elements, &near);
        if centers.len() == k || radius == 0.0 {
            return (centers, radius);
        }
        let c = elements[far];
        centers.push(c);
        for (slot, &e) in near.iter_mut().zip(elements) {
            *slot = slot.min(dist(e, c));
        }
    }
}

fn farthest(elements: &[usize], near: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for i in 1..elements.len() {
        if near[i] > near[best] || (near[i] == near[best] && elements[i] < elements[best]) {
            best = i;
        }
    }
    (best, near[best])
}

/// Where a candidate radius list came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusSource {
    AllPairs,
    Wspd,
    LinfRelational,
    CenterPairs,
}

/// Sorted, deduplicated distances to binary search over.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateRadii {
    pub values: Vec<f64>,
    pub source: RadiusSource,
}

impl CandidateRadii {
    pub fn from_values(mut values: Vec<f64>, source: RadiusSource) -> CandidateRadii {
        values.push(0.0);
        values.sort_by(f64::total_cmp);
        values.dedup();
        CandidateRadii { values, source }
    }
}

/// All pairwise distances with 0 prepended.
pub fn enumerate_radii(inst: &dyn SetSystem) -> CandidateRadii {
    let n = inst.len();
    let mut v = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            v.push(inst.dist(i, j));
        }
    }
    CandidateRadii::from_values(v, RadiusSource::AllPairs)
}

fn binom(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u64 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    acc
}

/// Number of subsets of size at most `r` of an `n`-set.
pub fn subsets_upto(n: usize, r: usize) -> u64 {
    (0..=r.min(n)).fold(0u64, |a, i| a.saturating_add(binom(n, i)))
}

/// Visits every subset of `0..n` of size at most `r`, by size then
/// lexicographically.
pub fn for_each_subset<F: FnMut(&[usize])>(n: usize, r: usize, mut f: F) {
    let mut buf = Vec::with_capacity(r);
    for size in 0..=r.min(n) {
        subsets_of_size(n, size, 0, &mut buf, &mut f);
    }
}

fn subsets_of_size<F: FnMut(&[usize])>(n: usize, size: usize, start: usize, buf: &mut Vec<usize>, f: &mut F) {
    if buf.len() == size {
        f(buf);
        return;
    }
    let need = size - buf.len();
    for i in start..=n - need {
        buf.push(i);
        subsets_of_size(n, size, i + 1, buf, f);
        buf.pop();
    }
}

/// Exact optimum of the set-outlier problem by exhaustive enumeration of at
/// most `k` centers and at most `z` outlier sets. Refuses when the number of
/// combinations exceeds `cap`.
pub fn brute_force_cso(inst: &dyn SetSystem, k: usize, z: usize, cap: u64) -> Result<(f64, TriSolution)> {
    let n = inst.len();
    let m = inst.num_sets();
    let work = subsets_upto(n, k).saturating_mul(subsets_upto(m, z));
    if work > cap {
        return Err(Error::CapExceeded(format!("exhaustive search needs {work} combinations (cap {cap})")));
    }
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    for_each_subset(m, z, |hs| {
        let excluded = excluded_mask(inst, hs);
        let free: Vec<usize> = (0..n).filter(|&i| !excluded[i]).collect();
        let survivors = free.clone();
        for_each_subset(free.len(), k, |cs| {
            let bound = best.as_ref().map_or(f64::INFINITY, |b| b.0);
            let mut worst: f64 = 0.0;
            for &i in &survivors {
                let near = cs.iter().map(|&c| inst.dist(i, free[c])).fold(f64::INFINITY, f64::min);
                worst = worst.max(near);
                if worst >= bound && best.is_some() {
                    return;
                }
            }
            best = Some((worst, cs.iter().map(|&c| free[c]).collect(), hs.to_vec()));
        });
    });
    let (r, c, h) = best.expect("the empty selection is always recorded");
    let sol = TriSolution::build(inst, c, h, Claim { centers: 1.0, outliers: 1.0, cost: 1.0 });
    debug_assert_eq!(sol.radius, r);
    Ok((r, sol))
}

/// Exact discrete k-center radius (centers drawn from the points).
pub fn brute_force_kcenter<F>(n: usize, dist: F, k: usize) -> f64
where
    F: Fn(usize, usize) -> f64,
{
    brute_force_kcenter_outliers(n, dist, k, 0)
}

/// Exact discrete k-center radius when the `z` farthest points may be
/// discarded.
pub fn brute_force_kcenter_outliers<F>(n: usize, dist: F, k: usize, z: usize) -> f64
where
    F: Fn(usize, usize) -> f64,
{
    if z >= n {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut near = vec![0.0; n];
    for_each_subset(n, k.min(n), |cs| {
        if cs.is_empty() {
            return;
        }
        for (i, slot) in near.iter_mut().enumerate() {
            *slot = cs.iter().map(|&c| dist(i, c)).fold(f64::INFINITY, f64::min);
        }
        near.sort_by(f64::total_cmp);
        best = best.min(near[n - 1 - z]);
    });
    best
}

/// Builds the one-dimensional set-outlier instance from a set-cover
/// instance over elements `0..nx`: element `i` becomes a point at
/// coordinate `i+1`, and `k` extra points sit at `2 nx + j` for `j = 1..=k`,
/// each in its own singleton set after the translated cover sets.
pub fn setcover_to_cso(nx: usize, cover_sets: &[Vec<usize>], k: usize) -> Result<GeneralInstance> {
    if k == 0 || k > nx {
        return Err(Error::Precondition(format!("need 1 <= k <= |X| (k={k}, |X|={nx})")));
    }
    let mut covered = vec![false; nx];
    for y in cover_sets {
        for &x in y {
            if x >= nx {
                return Err(Error::Index { what: "cover element".into(), index: x });
            }
            covered[x] = true;
        }
    }
    if let Some(x) = covered.iter().position(|&c| !c) {
        return Err(Error::Coverage(x));
    }
    let mut points: Vec<Vec<f64>> = (1..=nx).map(|i| vec![i as f64]).collect();
    points.extend((1..=k).map(|j| vec![(2 * nx + j) as f64]));
    let mut sets: Vec<Vec<usize>> = cover_sets.to_vec();
    sets.extend((0..k).map(|j| vec![nx + j]));
    GeneralInstance::new(Metric::Euclidean(points), sets)
}

/// Size of a minimum set cover, by exhaustive search.
pub fn min_set_cover(nx: usize, cover_sets: &[Vec<usize>]) -> usize {
    for size in 1..=cover_sets.len() {
        let mut found = false;
        for_each_subset(cover_sets.len(), size, |s| {
            if found || s.len() != size {
                return;
            }
            let mut hit = vec![false; nx];
            for &j in s {
                for &x in &cover_sets[j] {
                    hit[x] = true;
                }
            }
            found = hit.iter().all(|&h| h);
        });
        if found {
            return size;
        }
    }
    cover_sets.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn gonzalez_line_example() {
        let p: [f64; 3] = [0.0, 1.0, 10.0];
        let (c, r) = gonzalez_kcenter(&[0, 1, 2], |a, b| (p[a] - p[b]).abs(), 2);
        assert_eq!(c, vec![0, 2]);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn gonzalez_k_at_least_n() {
        let p: [f64; 3] = [0.0, 4.0, 9.0];
        let (_, r) = gonzalez_kcenter(&[0, 1, 2], |a, b| (p[a] - p[b]).abs(), 5);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn radii_examples() {
        let g = GeneralInstance::new(Metric::Euclidean(line(&[0.0, 5.0])), vec![vec![0, 1]]).unwrap();
        assert_eq!(enumerate_radii(&g).values, vec![0.0, 5.0]);
        let m = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 3.0], vec![2.0, 3.0, 0.0]];
        let g = GeneralInstance::new(Metric::Matrix(m), vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(enumerate_radii(&g).values, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn brute_force_small_cases() {
        let g = GeneralInstance::new(Metric::Euclidean(line(&[0.0])), vec![vec![0]]).unwrap();
        assert_eq!(brute_force_cso(&g, 1, 1, BRUTE).unwrap().0, 0.0);
        let g = GeneralInstance::new(Metric::Euclidean(line(&[0.0, 1.0, 10.0, 11.0])), vec![vec![2, 3], vec![0, 1]])
            .unwrap();
        let (r, sol) = brute_force_cso(&g, 1, 1, BRUTE).unwrap();
        assert_eq!(r, 1.0);
        assert_eq!(sol.radius, 1.0);
    }

    const BRUTE: u64 = crate::constants::BRUTE_FORCE_CAP;

    #[test]
    fn brute_force_refuses_over_cap() {
        let pts: Vec<f64> = (0..40).map(f64::from).collect();
        let g = GeneralInstance::new(Metric::Euclidean(line(&pts)), vec![(0..40).collect()]).unwrap();
        assert!(matches!(brute_force_cso(&g, 6, 1, BRUTE), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn setcover_single_element() {
        let g = setcover_to_cso(1, &[vec![0]], 1).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.dist(0, 1), 2.0);
        match g.metric() {
            Metric::Euclidean(p) => assert_eq!(p, &vec![vec![1.0], vec![3.0]]),
            _ => unreachable!(),
        }
        assert_eq!(g.sets(), &[vec![0], vec![1]]);
    }

    #[test]
    fn setcover_rejects_uncovered() {
        assert!(matches!(setcover_to_cso(2, &[vec![0]], 1), Err(Error::Coverage(1))));
    }

    #[test]
    fn kcenter_outlier_oracle() {
        let p: [f64; 4] = [0.0, 1.0, 2.0, 50.0];
        let d = |a: usize, b: usize| (p[a] - p[b]).abs();
        assert_eq!(brute_force_kcenter(4, d, 1), 48.0);
        assert_eq!(brute_force_kcenter_outliers(4, d, 1, 1), 1.0);
        assert_eq!(brute_force_kcenter(4, d, 2), 1.0);
    }

    #[test]
    fn subset_enumeration_counts() {
        let mut count = 0;
        for_each_subset(6, 2, |_| count += 1);
        assert_eq!(count as u64, subsets_upto(6, 2));
        assert_eq!(count, 1 + 6 + 15);
    }
}
