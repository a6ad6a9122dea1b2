//! Seeded instance generators: clustered points with planted outlier sets,
//! random set-cover instances and acyclic databases with planted bad tuples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Bound, GeneralInstance, GeometricInstance, Metric, Rect};
use crate::relational::{Database, Relation, TupleId};

/// Far points sit this far out along the first axis.
const FAR: f64 = 1000.0;
const CLUSTER_BOX: f64 = 100.0;
const CLUSTER_SPREAD: f64 = 3.0;

/// An instance together with the sets (or tuples) planted as outliers.
#[derive(Clone, Debug)]
pub struct Planted<T, P = usize> {
    pub instance: T,
    pub planted: Vec<P>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointGen {
    /// Total number of points, far ones included.
    pub n: usize,
    pub d: usize,
    /// Number of clusters.
    pub k: usize,
    /// Number of planted far groups, one set each.
    pub z: usize,
    /// Number of sets or rectangles.
    pub m: usize,
}

impl PointGen {
    fn check(&self) -> Result<()> {
        if self.d == 0 || self.k == 0 {
            return Err(Error::Precondition("need d >= 1 and k >= 1".into()));
        }
        if self.m <= self.z {
            return Err(Error::Precondition(format!("need more sets than planted groups (m={}, z={})", self.m, self.z)));
        }
        if self.n < self.z + (self.m - self.z) {
            return Err(Error::Precondition(format!("{} points cannot fill {} sets", self.n, self.m)));
        }
        Ok(())
    }
}

/// Cluster points first, then `z` far groups of one or two points.
/// Returns the points and, per group, its point indices.
fn clustered_points(g: &PointGen, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let far_sizes: Vec<usize> = (0..g.z).map(|_| if g.n - g.z >= g.m + 2 && rng.gen_bool(0.5) { 2 } else { 1 }).collect();
    let n_far: usize = far_sizes.iter().sum();
    let n_in = g.n - n_far;
    let centers: Vec<Vec<f64>> = (0..g.k).map(|_| (0..g.d).map(|_| rng.gen_range(0.0..CLUSTER_BOX)).collect()).collect();
    let mut points: Vec<Vec<f64>> = (0..n_in)
        .map(|i| {
            let c = &centers[i % g.k];
            c.iter().map(|&x| x + rng.gen_range(-CLUSTER_SPREAD..CLUSTER_SPREAD)).collect()
        })
        .collect();
    let mut groups = Vec::new();
    for (j, &s) in far_sizes.iter().enumerate() {
        let mut grp = Vec::new();
        for _ in 0..s {
            let mut p: Vec<f64> = (0..g.d).map(|_| rng.gen_range(-CLUSTER_SPREAD..CLUSTER_SPREAD)).collect();
            p[0] += FAR * (j + 1) as f64;
            grp.push(points.len());
            points.push(p);
        }
        groups.push(grp);
    }
    (points, groups)
}

/// Euclidean general instance: the first `z` sets hold the far groups, the
/// rest partition the cluster points, and each cluster point joins up to
/// `f - 1` further sets.
pub fn planted_general(seed: u64, g: &PointGen, f: usize) -> Result<Planted<GeneralInstance>> {
    g.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (points, groups) = clustered_points(g, &mut rng);
    let n_in = points.len() - groups.iter().map(Vec::len).sum::<usize>();
    let free = g.m - g.z;
    let mut sets: Vec<Vec<usize>> = groups;
    sets.resize(g.m, Vec::new());
    let mut order: Vec<usize> = (0..n_in).collect();
    order.shuffle(&mut rng);
    for (pos, &i) in order.iter().enumerate() {
        // The first `free` points seed one set each so none is empty.
        let home = if pos < free { pos } else { rng.gen_range(0..free) };
        sets[g.z + home].push(i);
        for _ in 1..f.max(1) {
            let extra = rng.gen_range(0..free);
            if rng.gen_bool(0.5) && !sets[g.z + extra].contains(&i) {
                sets[g.z + extra].push(i);
            }
        }
    }
    let instance = GeneralInstance::new(Metric::Euclidean(points), sets)?;
    Ok(Planted { instance, planted: (0..g.z).collect() })
}

fn slab(lo: f64, hi: f64, d: usize) -> Rect {
    let mut l = vec![Bound::NegInf; d];
    let mut h = vec![Bound::PosInf; d];
    l[0] = Bound::Finite(lo);
    h[0] = Bound::Finite(hi);
    Rect::new(l, h)
}

fn bounding_box(points: &[Vec<f64>], idx: &[usize], pad: f64) -> (Vec<f64>, Vec<f64>) {
    let d = points[idx[0]].len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for &i in idx {
        for a in 0..d {
            lo[a] = lo[a].min(points[i][a] - pad);
            hi[a] = hi[a].max(points[i][a] + pad);
        }
    }
    (lo, hi)
}

/// Geometric instance with the far groups in the first `z` rectangles.
/// With `disjoint`, every rectangle is a slab along the first axis and the
/// slabs split the points into contiguous runs; otherwise the remaining
/// rectangles are random boxes, grown until they cover every point.
pub fn planted_geometric(seed: u64, g: &PointGen, disjoint: bool) -> Result<Planted<GeometricInstance>> {
    g.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (points, groups) = clustered_points(g, &mut rng);
    let n_in = points.len() - groups.iter().map(Vec::len).sum::<usize>();
    let free = g.m - g.z;
    let mut rects = Vec::with_capacity(g.m);
    if disjoint {
        for grp in &groups {
            let xs: Vec<f64> = grp.iter().map(|&i| points[i][0]).collect();
            rects.push(slab(xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max), g.d));
        }
        let mut xs: Vec<f64> = points[..n_in].iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        if xs.len() < free {
            return Err(Error::Precondition("too few distinct coordinates for the slabs".into()));
        }
        let mut cuts: Vec<usize> = (1..xs.len()).collect();
        cuts.shuffle(&mut rng);
        cuts.truncate(free - 1);
        cuts.sort_unstable();
        let mut start = 0;
        for end in cuts.into_iter().chain([xs.len()]) {
            rects.push(slab(xs[start], xs[end - 1], g.d));
            start = end;
        }
    } else {
        for grp in &groups {
            let (lo, hi) = bounding_box(&points, grp, 0.5);
            rects.push(Rect::from_f64(&lo, &hi));
        }
        let mut boxes: Vec<(Vec<f64>, Vec<f64>)> = (0..free)
            .map(|_| {
                let c = rng.gen_range(0..n_in);
                let h = rng.gen_range(5.0..40.0);
                (points[c].iter().map(|x| x - h).collect(), points[c].iter().map(|x| x + h).collect())
            })
            .collect();
        for p in &points[..n_in] {
            let inside = boxes.iter().any(|(lo, hi)| p.iter().enumerate().all(|(a, &x)| lo[a] <= x && x <= hi[a]));
            if !inside {
                let (lo, hi) = &mut boxes[rng.gen_range(0..free)];
                for (a, &x) in p.iter().enumerate() {
                    lo[a] = lo[a].min(x);
                    hi[a] = hi[a].max(x);
                }
            }
        }
        rects.extend(boxes.iter().map(|(lo, hi)| Rect::from_f64(lo, hi)));
    }
    let instance = GeometricInstance::new(points, rects)?;
    Ok(Planted { instance, planted: (0..g.z).collect() })
}

/// Uniform points in `[0, 10]^d`; every element joins between one and `f`
/// random sets, and every set gets at least one element.
pub fn random_general(seed: u64, n: usize, m: usize, f: usize, d: usize) -> Result<GeneralInstance> {
    if n < m || m == 0 || d == 0 {
        return Err(Error::Precondition(format!("need 1 <= m <= n and d >= 1 (n={n}, m={m}, d={d})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(0.0..10.0)).collect()).collect();
    let mut sets = vec![Vec::new(); m];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for (pos, &i) in order.iter().enumerate() {
        let mut js: Vec<usize> = (0..m).collect();
        js.shuffle(&mut rng);
        let c = rng.gen_range(1..=f.clamp(1, m));
        if pos < m && !js[..c].contains(&pos) {
            js[0] = pos;
        }
        for &j in &js[..c] {
            sets[j].push(i);
        }
    }
    GeneralInstance::new(Metric::Euclidean(points), sets)
}

/// Uniform points in `[0, 10]^d` with random boxes, grown until every
/// point is covered.
pub fn random_geometric(seed: u64, n: usize, m: usize, d: usize) -> Result<GeometricInstance> {
    if n == 0 || m == 0 || d == 0 {
        return Err(Error::Precondition("need n, m, d >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(0.0..10.0)).collect()).collect();
    let mut boxes: Vec<(Vec<f64>, Vec<f64>)> = (0..m)
        .map(|_| {
            let c = &points[rng.gen_range(0..n)];
            let h: Vec<f64> = (0..d).map(|_| rng.gen_range(0.2..3.0)).collect();
            (c.iter().zip(&h).map(|(x, h)| x - h).collect(), c.iter().zip(&h).map(|(x, h)| x + h).collect())
        })
        .collect();
    for p in &points {
        let inside = boxes.iter().any(|(lo, hi)| p.iter().enumerate().all(|(a, &x)| lo[a] <= x && x <= hi[a]));
        if !inside {
            let (lo, hi) = &mut boxes[rng.gen_range(0..m)];
            for (a, &x) in p.iter().enumerate() {
                lo[a] = lo[a].min(x);
                hi[a] = hi[a].max(x);
            }
        }
    }
    GeometricInstance::new(points, boxes.iter().map(|(lo, hi)| Rect::from_f64(lo, hi)).collect())
}

/// Random set-cover instance over `0..nx` with `m` nonempty sets covering
/// every element.
pub fn setcover(seed: u64, nx: usize, m: usize) -> Result<Vec<Vec<usize>>> {
    if nx == 0 || m == 0 {
        return Err(Error::Precondition("need at least one element and one set".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets: Vec<Vec<usize>> = (0..m).map(|_| (0..nx).filter(|_| rng.gen_bool(0.35)).collect()).collect();
    for x in 0..nx {
        if !sets.iter().any(|s| s.contains(&x)) {
            sets[rng.gen_range(0..m)].push(x);
        }
    }
    for s in &mut sets {
        if s.is_empty() {
            s.push(rng.gen_range(0..nx));
        }
        s.sort_unstable();
    }
    Ok(sets)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelGen {
    /// Number of relations.
    pub g: usize,
    /// Number of attributes, at least `g`.
    pub d: usize,
    /// Rows drawn per relation before deduplication.
    pub rows: usize,
    /// Value clusters of the non-key attributes.
    pub clusters: usize,
    /// Planted bad tuples.
    pub bad: usize,
    /// Relation receiving the bad tuples.
    pub bad_rel: usize,
}

/// Random acyclic database. Relations form a random tree; every relation
/// brings at least one new attribute and shares one attribute with its
/// parent. Rows copy their shared values from a random parent row, so
/// every row joins, and draw new values near one of the clusters. Bad
/// tuples carry a far value in an attribute their relation introduces;
/// rows of later relations may copy from them.
pub fn planted_database(seed: u64, p: &RelGen) -> Result<Planted<Database, TupleId>> {
    if p.g == 0 || p.d < p.g || p.rows == 0 || p.clusters == 0 || p.bad_rel >= p.g {
        return Err(Error::Precondition("need g >= 1, d >= g, rows >= 1, clusters >= 1 and a valid bad relation".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut own: Vec<Vec<usize>> = (0..p.g).map(|j| vec![j]).collect();
    for a in p.g..p.d {
        own[rng.gen_range(0..p.g)].push(a);
    }
    let parent: Vec<Option<usize>> = (0..p.g).map(|j| (j > 0).then(|| rng.gen_range(0..j))).collect();
    let mut attrs: Vec<Vec<usize>> = Vec::with_capacity(p.g);
    for j in 0..p.g {
        let mut a = Vec::new();
        if let Some(pj) = parent[j] {
            let pa: &Vec<usize> = &attrs[pj];
            a.push(*pa.choose(&mut rng).expect("parents have attributes"));
        }
        a.extend(own[j].iter().copied());
        attrs.push(a);
    }
    let centers: Vec<f64> = (0..p.clusters).map(|c| 20.0 * c as f64).collect();
    let mut fresh = |rng: &mut ChaCha8Rng| centers[rng.gen_range(0..centers.len())] + rng.gen_range(0..4) as f64;
    let mut rows: Vec<Vec<Vec<f64>>> = Vec::with_capacity(p.g);
    let mut planted = Vec::new();
    for j in 0..p.g {
        let draw = |rng: &mut ChaCha8Rng, rows: &Vec<Vec<Vec<f64>>>, fresh: &mut dyn FnMut(&mut ChaCha8Rng) -> f64| -> Vec<f64> {
            let mut row = Vec::with_capacity(attrs[j].len());
            let from = parent[j].map(|pj| rows[pj][rng.gen_range(0..rows[pj].len())].clone());
            for (i, &a) in attrs[j].iter().enumerate() {
                if i == 0 && parent[j].is_some() {
                    let pj = parent[j].expect("checked");
                    let pos = attrs[pj].iter().position(|&b| b == a).expect("shared attribute");
                    row.push(from.as_ref().expect("parent row")[pos]);
                } else {
                    row.push(fresh(rng));
                }
            }
            row
        };
        let mut rs: Vec<Vec<f64>> = Vec::new();
        for _ in 0..p.rows {
            let row = draw(&mut rng, &rows, &mut fresh);
            if !rs.contains(&row) {
                rs.push(row);
            }
        }
        if j == p.bad_rel {
            for b in 0..p.bad {
                let mut row = draw(&mut rng, &rows, &mut fresh);
                let last = row.len() - 1;
                row[last] = FAR * (b + 1) as f64;
                planted.push(TupleId { rel: j, row: rs.len() });
                rs.push(row);
            }
        }
        rows.push(rs);
    }
    let names = (0..p.d).map(|a| format!("A{a}")).collect();
    let relations = (0..p.g)
        .map(|j| Relation { name: format!("R{}", j + 1), attrs: attrs[j].clone(), rows: rows[j].clone() })
        .collect();
    let instance = Database::new(names, relations)?;
    Ok(Planted { instance, planted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SetSystem;
    use crate::relational::{build_join_tree, yannakakis_count, Query};

    const G: PointGen = PointGen { n: 12, d: 2, k: 2, z: 2, m: 5 };

    #[test]
    fn general_respects_frequency() {
        for seed in 0..20 {
            let p = planted_general(seed, &G, 3).unwrap();
            assert!(p.instance.frequency() <= 3);
            assert_eq!(p.instance.len(), 12);
        }
    }

    #[test]
    fn disjoint_geometric_has_frequency_one() {
        for seed in 0..20 {
            let p = planted_geometric(seed, &PointGen { n: 30, d: 3, k: 3, z: 2, m: 6 }, true).unwrap();
            assert_eq!(p.instance.frequency(), 1);
            assert_eq!(p.instance.num_sets(), 6);
        }
    }

    #[test]
    fn overlapping_geometric_loads() {
        for seed in 0..20 {
            assert!(planted_geometric(seed, &PointGen { n: 40, d: 2, k: 2, z: 1, m: 8 }, false).is_ok());
        }
    }

    #[test]
    fn random_instances_load() {
        for seed in 0..20 {
            let g = random_general(seed, 10, 4, 3, 2).unwrap();
            assert!(g.frequency() <= 3);
            assert!(g.sets().iter().all(|s| !s.is_empty()));
            assert!(random_geometric(seed, 30, 5, 3).is_ok());
        }
    }

    #[test]
    fn seeded_output_repeats() {
        let a = planted_general(5, &G, 2).unwrap();
        let b = planted_general(5, &G, 2).unwrap();
        assert_eq!(a.instance.sets(), b.instance.sets());
        assert_eq!(setcover(9, 6, 4).unwrap(), setcover(9, 6, 4).unwrap());
    }

    #[test]
    fn databases_are_acyclic_and_join() {
        for seed in 0..30 {
            let p = planted_database(seed, &RelGen { g: 3, d: 4, rows: 5, clusters: 2, bad: 1, bad_rel: (seed % 3) as usize }).unwrap();
            assert!(build_join_tree(&p.instance).is_ok());
            let q = Query::new(&p.instance).unwrap();
            assert!(yannakakis_count(&q) > 0);
            assert_eq!(p.planted.len(), 1);
        }
    }
}
