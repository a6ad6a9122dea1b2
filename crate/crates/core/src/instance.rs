//! Instance model shared by every solver: general metric instances with an
//! explicit set family, geometric instances whose sets are induced by
//! hyper-rectangles, solutions and their independent validation.

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this many elements the O(n^3) triangle check on load is skipped.
pub const TRIANGLE_CHECK_CAP: usize = 200;

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Interval endpoint. Infinite endpoints are open, finite ones closed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Bound {
    pub fn value(self) -> f64 {
        match self {
            Bound::NegInf => f64::NEG_INFINITY,
            Bound::Finite(v) => v,
            Bound::PosInf => f64::INFINITY,
        }
    }

    fn from_f64(v: f64) -> Bound {
        if v == f64::INFINITY {
            Bound::PosInf
        } else if v == f64::NEG_INFINITY {
            Bound::NegInf
        } else {
            Bound::Finite(v)
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::NegInf => s.serialize_str("-inf"),
            Bound::PosInf => s.serialize_str("+inf"),
            Bound::Finite(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Bound, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Bound;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"-inf\" or \"+inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Bound, E> {
                Ok(Bound::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Bound, E> {
                Ok(Bound::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Bound, E> {
                Ok(Bound::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Bound, E> {
                match v {
                    "-inf" => Ok(Bound::NegInf),
                    "+inf" | "inf" => Ok(Bound::PosInf),
                    _ => Err(E::custom(format!("bad endpoint {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Axis-aligned hyper-rectangle with closed finite endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Vec<Bound>,
    pub hi: Vec<Bound>,
}

impl Rect {
    pub fn new(lo: Vec<Bound>, hi: Vec<Bound>) -> Rect {
        Rect { lo, hi }
    }

    pub fn from_f64(lo: &[f64], hi: &[f64]) -> Rect {
        Rect {
            lo: lo.iter().map(|&v| Bound::from_f64(v)).collect(),
            hi: hi.iter().map(|&v| Bound::from_f64(v)).collect(),
        }
    }

    /// The whole space.
    pub fn full(d: usize) -> Rect {
        Rect { lo: vec![Bound::NegInf; d], hi: vec![Bound::PosInf; d] }
    }

    /// Closed cube of half-side `h` around `c`.
    pub fn cube(c: &[f64], h: f64) -> Rect {
        Rect {
            lo: c.iter().map(|&x| Bound::Finite(x - h)).collect(),
            hi: c.iter().map(|&x| Bound::Finite(x + h)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Interval on axis `a` as a pair of floats, infinities included.
    pub fn interval(&self, a: usize) -> (f64, f64) {
        (self.lo[a].value(), self.hi[a].value())
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        (0..self.dim()).all(|a| self.contains_coord(a, p[a]))
    }

    pub fn contains_coord(&self, a: usize, x: f64) -> bool {
        let lo_ok = match self.lo[a] {
            Bound::NegInf => true,
            Bound::Finite(v) => v <= x,
            Bound::PosInf => false,
        };
        let hi_ok = match self.hi[a] {
            Bound::PosInf => true,
            Bound::Finite(v) => x <= v,
            Bound::NegInf => false,
        };
        lo_ok && hi_ok
    }

    /// True when every interval is non-empty.
    pub fn well_ordered(&self) -> bool {
        (0..self.dim()).all(|a| {
            let (lo, hi) = self.interval(a);
            lo <= hi && self.lo[a] != Bound::PosInf && self.hi[a] != Bound::NegInf
        })
    }
}

/// Distance backing of a general instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    Matrix(Vec<Vec<f64>>),
    Euclidean(Vec<Vec<f64>>),
}

/// Read-only view shared by general and geometric instances.
pub trait SetSystem {
    fn len(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> f64;
    fn num_sets(&self) -> usize;
    fn set(&self, j: usize) -> &[usize];
    fn sets_of(&self, i: usize) -> &[usize];

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Maximum number of sets containing a single element.
    fn frequency(&self) -> usize {
        (0..self.len()).map(|i| self.sets_of(i).len()).max().unwrap_or(0)
    }
}

fn membership(n: usize, sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut l = vec![Vec::new(); n];
    for (j, s) in sets.iter().enumerate() {
        for &i in s {
            l[i].push(j);
        }
    }
    l
}

/// n elements under a metric plus a family of outlier-candidate subsets.
#[derive(Clone, Debug)]
pub struct GeneralInstance {
    n: usize,
    metric: Metric,
    sets: Vec<Vec<usize>>,
    members: Vec<Vec<usize>>,
}

impl GeneralInstance {
    pub fn new(metric: Metric, sets: Vec<Vec<usize>>) -> Result<GeneralInstance> {
        let n = match &metric {
            Metric::Matrix(m) => {
                for (i, row) in m.iter().enumerate() {
                    if row.len() != m.len() {
                        return Err(Error::Dimension {
                            record: format!("dist_matrix row {i}"),
                            detail: format!("expected {} entries, found {}", m.len(), row.len()),
                        });
                    }
                }
                m.len()
            }
            Metric::Euclidean(p) => {
                if let Some(d) = p.first().map(Vec::len) {
                    for (i, q) in p.iter().enumerate() {
                        if q.len() != d {
                            return Err(Error::Dimension {
                                record: format!("point {i}"),
                                detail: format!("expected {d} coordinates, found {}", q.len()),
                            });
                        }
                    }
                }
                p.len()
            }
        };
        if sets.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let sets: Vec<Vec<usize>> = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        for s in &sets {
            if let Some(&i) = s.iter().find(|&&i| i >= n) {
                return Err(Error::Index { what: "set member".into(), index: i });
            }
        }
        let members = membership(n, &sets);
        if let Some(i) = members.iter().position(Vec::is_empty) {
            return Err(Error::Coverage(i));
        }
        if let Metric::Matrix(m) = &metric {
            check_matrix(m)?;
        }
        Ok(GeneralInstance { n, metric, sets, members })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }
}

fn check_matrix(m: &[Vec<f64>]) -> Result<()> {
    let n = m.len();
    for i in 0..n {
        if m[i][i] != 0.0 {
            return Err(Error::Malformed(format!("dist({i},{i}) is not zero")));
        }
        for j in 0..n {
            if !(m[i][j] >= 0.0) || m[i][j] != m[j][i] || !m[i][j].is_finite() {
                return Err(Error::Malformed(format!("dist({i},{j}) is not a symmetric finite nonnegative value")));
            }
        }
    }
    if n > TRIANGLE_CHECK_CAP {
        return Ok(());
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let bound = m[i][j] + m[j][k];
                if m[i][k] > bound + 1e-9 * bound.max(1.0) {
                    return Err(Error::Triangle(i, j, k));
                }
            }
        }
    }
    Ok(())
}

impl SetSystem for GeneralInstance {
    fn len(&self) -> usize {
        self.n
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.metric {
            Metric::Matrix(m) => m[i][j],
            Metric::Euclidean(p) => euclid(&p[i], &p[j]),
        }
    }

    fn num_sets(&self) -> usize {
        self.sets.len()
    }

    fn set(&self, j: usize) -> &[usize] {
        &self.sets[j]
    }

    fn sets_of(&self, i: usize) -> &[usize] {
        &self.members[i]
    }
}

/// Points in R^d with hyper-rectangles inducing the outlier sets.
#[derive(Clone, Debug)]
pub struct GeometricInstance {
    d: usize,
    points: Vec<Vec<f64>>,
    rects: Vec<Rect>,
    sets: Vec<Vec<usize>>,
    members: Vec<Vec<usize>>,
}

impl GeometricInstance {
    pub fn new(points: Vec<Vec<f64>>, rects: Vec<Rect>) -> Result<GeometricInstance> {
        let d = points.first().map(Vec::len).unwrap_or(0);
        for (i, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::Dimension {
                    record: format!("point {i}"),
                    detail: format!("expected {d} coordinates, found {}", p.len()),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Malformed(format!("point {i} has a non-finite coordinate")));
            }
        }
        if rects.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for (j, r) in rects.iter().enumerate() {
            if r.lo.len() != d || r.hi.len() != d {
                return Err(Error::Dimension {
                    record: format!("rect {j}"),
                    detail: format!("expected {d} intervals"),
                });
            }
            if !r.well_ordered() {
                return Err(Error::Malformed(format!("rect {j} has an empty interval")));
            }
        }
        let sets: Vec<Vec<usize>> = rects
            .iter()
            .map(|r| (0..points.len()).filter(|&i| r.contains(&points[i])).collect())
            .collect();
        let members = membership(points.len(), &sets);
        if let Some(i) = members.iter().position(Vec::is_empty) {
            return Err(Error::Coverage(i));
        }
        Ok(GeometricInstance { d, points, rects, sets, members })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    /// The induced set system as a general instance under the Euclidean metric.
    pub fn to_general(&self) -> GeneralInstance {
        GeneralInstance {
            n: self.points.len(),
            metric: Metric::Euclidean(self.points.clone()),
            sets: self.sets.clone(),
            members: self.members.clone(),
        }
    }
}

impl SetSystem for GeometricInstance {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        euclid(&self.points[i], &self.points[j])
    }

    fn num_sets(&self) -> usize {
        self.rects.len()
    }

    fn set(&self, j: usize) -> &[usize] {
        &self.sets[j]
    }

    fn sets_of(&self, i: usize) -> &[usize] {
        &self.members[i]
    }
}

/// Either instance kind, as read from disk.
#[derive(Clone, Debug)]
pub enum Instance {
    General(GeneralInstance),
    Geometric(GeometricInstance),
}

impl Instance {
    pub fn as_set_system(&self) -> &dyn SetSystem {
        match self {
            Instance::General(g) => g,
            Instance::Geometric(g) => g,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub k: usize,
    pub z: usize,
    pub eps: f64,
}

impl Params {
    pub fn new(k: usize, z: usize, eps: f64) -> Result<Params> {
        if k == 0 || z == 0 || !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Precondition(format!(
                "need k >= 1, z >= 1, 0 < eps < 1 (got k={k}, z={z}, eps={eps})"
            )));
        }
        Ok(Params { k, z, eps })
    }
}

/// Caps a solver claims for its own output, kept for audit.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Claim {
    pub centers: f64,
    pub outliers: f64,
    pub cost: f64,
}

/// Centers, chosen outlier sets and the achieved radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriSolution {
    pub centers: Vec<usize>,
    pub outliers: Vec<usize>,
    pub radius: f64,
    #[serde(skip)]
    pub claim: Claim,
}

impl TriSolution {
    /// Builds a solution and recomputes its radius from scratch.
    pub fn build(inst: &dyn SetSystem, mut centers: Vec<usize>, mut outliers: Vec<usize>, claim: Claim) -> TriSolution {
        centers.sort_unstable();
        centers.dedup();
        outliers.sort_unstable();
        outliers.dedup();
        let excluded = excluded_mask(inst, &outliers);
        let radius = clustering_cost(inst, &centers, &excluded);
        TriSolution { centers, outliers, radius, claim }
    }
}

pub fn excluded_mask(inst: &dyn SetSystem, outliers: &[usize]) -> Vec<bool> {
    let mut ex = vec![false; inst.len()];
    for &j in outliers {
        for &i in inst.set(j) {
            ex[i] = true;
        }
    }
    ex
}

/// Max over non-excluded elements of the distance to the nearest center.
/// Infinite when elements survive but there are no centers.
pub fn clustering_cost(inst: &dyn SetSystem, centers: &[usize], excluded: &[bool]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..inst.len() {
        if excluded[i] {
            continue;
        }
        let near = centers.iter().map(|&c| inst.dist(i, c)).fold(f64::INFINITY, f64::min);
        worst = worst.max(near);
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport {
    pub centers_ok: bool,
    pub outliers_ok: bool,
    pub disjoint: bool,
    pub radius: f64,
    pub num_centers: usize,
    pub num_outliers: usize,
}

impl ValidityReport {
    pub fn valid(&self) -> bool {
        self.centers_ok && self.outliers_ok && self.disjoint
    }
}

/// Checks a solution against `mu = (center factor, outlier factor, cost factor)`.
/// Only the count caps and disjointness are judged here; the radius is
/// recomputed so callers can compare it against an optimum.
pub fn validate_solution(
    inst: &dyn SetSystem,
    sol: &TriSolution,
    p: &Params,
    mu: (f64, f64, f64),
) -> Result<ValidityReport> {
    if let Some(&c) = sol.centers.iter().find(|&&c| c >= inst.len()) {
        return Err(Error::Index { what: "center".into(), index: c });
    }
    if let Some(&h) = sol.outliers.iter().find(|&&h| h >= inst.num_sets()) {
        return Err(Error::Index { what: "outlier set".into(), index: h });
    }
    let mut centers = sol.centers.clone();
    centers.sort_unstable();
    centers.dedup();
    let mut outliers = sol.outliers.clone();
    outliers.sort_unstable();
    outliers.dedup();
    let excluded = excluded_mask(inst, &outliers);
    Ok(ValidityReport {
        centers_ok: centers.len() as f64 <= mu.0 * p.k as f64,
        outliers_ok: outliers.len() as f64 <= mu.1 * p.z as f64,
        disjoint: centers.iter().all(|&c| !excluded[c]),
        radius: clustering_cost(inst, &centers, &excluded),
        num_centers: centers.len(),
        num_outliers: outliers.len(),
    })
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    kind: String,
    n: usize,
    d: Option<usize>,
    points: Option<Vec<Vec<f64>>>,
    dist_matrix: Option<Vec<Vec<f64>>>,
    sets: Option<Vec<Vec<usize>>>,
    rects: Option<Vec<Rect>>,
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let f: InstanceFile = serde_json::from_str(text)?;
    let inst = match f.kind.as_str() {
        "general" => {
            let sets = f.sets.ok_or_else(|| Error::Malformed("general instance without sets".into()))?;
            let metric = match (f.dist_matrix, f.points) {
                (Some(m), _) => Metric::Matrix(m),
                (None, Some(p)) => Metric::Euclidean(p),
                (None, None) => return Err(Error::Malformed("general instance without distances".into())),
            };
            Instance::General(GeneralInstance::new(metric, sets)?)
        }
        "geometric" => {
            let points = f.points.ok_or_else(|| Error::Malformed("geometric instance without points".into()))?;
            let rects = f.rects.ok_or_else(|| Error::Malformed("geometric instance without rects".into()))?;
            if let Some(d) = f.d {
                if let Some(p) = points.first() {
                    if p.len() != d {
                        return Err(Error::Dimension {
                            record: "header".into(),
                            detail: format!("d={d} but points have {} coordinates", p.len()),
                        });
                    }
                }
            }
            Instance::Geometric(GeometricInstance::new(points, rects)?)
        }
        other => return Err(Error::Malformed(format!("unknown kind {other:?}"))),
    };
    let n = inst.as_set_system().len();
    if n != f.n {
        return Err(Error::Dimension { record: "header".into(), detail: format!("n={} but {n} elements given", f.n) });
    }
    Ok(inst)
}

pub fn instance_to_json(inst: &Instance) -> String {
    let file = match inst {
        Instance::General(g) => {
            let (points, dist_matrix, d) = match &g.metric {
                Metric::Matrix(m) => (None, Some(m.clone()), None),
                Metric::Euclidean(p) => (Some(p.clone()), None, p.first().map(Vec::len)),
            };
            InstanceFile { kind: "general".into(), n: g.n, d, points, dist_matrix, sets: Some(g.sets.clone()), rects: None }
        }
        Instance::Geometric(g) => InstanceFile {
            kind: "geometric".into(),
            n: g.points.len(),
            d: Some(g.d),
            points: Some(g.points.clone()),
            dist_matrix: None,
            sets: None,
            rects: Some(g.rects.clone()),
        },
    };
    serde_json::to_string(&file).expect("instance serializes")
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    instance_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_instance(path: &Path, inst: &Instance) -> Result<()> {
    std::fs::write(path, instance_to_json(inst))?;
    Ok(())
}

pub fn load_solution(path: &Path) -> Result<TriSolution> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn save_solution(path: &Path, sol: &TriSolution) -> Result<()> {
    std::fs::write(path, serde_json::to_string(sol)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64], sets: Vec<Vec<usize>>) -> GeneralInstance {
        GeneralInstance::new(Metric::Euclidean(xs.iter().map(|&x| vec![x]).collect()), sets).unwrap()
    }

    #[test]
    fn single_point_self_covers() {
        let g = line(&[0.0], vec![vec![0]]);
        let p = Params::new(1, 1, 0.1).unwrap();
        let sol = TriSolution::build(&g, vec![0], vec![], Claim::default());
        let rep = validate_solution(&g, &sol, &p, (1.0, 1.0, 1.0)).unwrap();
        assert!(rep.valid());
        assert_eq!(rep.radius, 0.0);
    }

    #[test]
    fn center_inside_outlier_is_invalid() {
        let g = line(&[0.0, 1.0], vec![vec![0], vec![1]]);
        let p = Params::new(1, 1, 0.1).unwrap();
        let sol = TriSolution::build(&g, vec![0], vec![0], Claim::default());
        assert!(!validate_solution(&g, &sol, &p, (1.0, 1.0, 1.0)).unwrap().valid());
    }

    #[test]
    fn four_point_line() {
        let g = line(&[0.0, 1.0, 10.0, 11.0], vec![vec![2, 3], vec![0, 1]]);
        let p = Params::new(1, 1, 0.1).unwrap();
        let sol = TriSolution::build(&g, vec![0], vec![0], Claim::default());
        let rep = validate_solution(&g, &sol, &p, (1.0, 1.0, 1.0)).unwrap();
        assert!(rep.valid());
        assert_eq!(rep.radius, 1.0);
    }

    #[test]
    fn cost_on_a_line() {
        let g = line(&[0.0, 3.0, 7.0], vec![vec![0, 1, 2]]);
        assert_eq!(clustering_cost(&g, &[1], &[false; 3]), 4.0);
        assert_eq!(clustering_cost(&g, &[1], &[true, false, true]), 0.0);
        assert_eq!(clustering_cost(&g, &[], &[false; 3]), f64::INFINITY);
        assert_eq!(clustering_cost(&g, &[], &[true; 3]), 0.0);
    }

    #[test]
    fn out_of_range_center_is_structural_error() {
        let g = line(&[0.0], vec![vec![0]]);
        let sol = TriSolution { centers: vec![3], outliers: vec![], radius: 0.0, claim: Claim::default() };
        let p = Params::new(1, 1, 0.1).unwrap();
        assert!(matches!(validate_solution(&g, &sol, &p, (1.0, 1.0, 1.0)), Err(Error::Index { .. })));
    }

    #[test]
    fn minimal_geometric_file_parses() {
        let text = r#"{"kind":"geometric","n":1,"d":2,"points":[[0.5,0.5]],"dist_matrix":null,"sets":null,
            "rects":[{"lo":["-inf",0],"hi":[1,"+inf"]}]}"#;
        let inst = instance_from_json(text).unwrap();
        assert_eq!(inst.as_set_system().len(), 1);
    }

    #[test]
    fn uncovered_point_is_coverage_error() {
        let text = r#"{"kind":"geometric","n":2,"d":1,"points":[[0.5],[3]],"dist_matrix":null,"sets":null,
            "rects":[{"lo":[0],"hi":[1]}]}"#;
        assert!(matches!(instance_from_json(text), Err(Error::Coverage(1))));
    }

    #[test]
    fn load_errors_are_typed() {
        let bad_dim = r#"{"kind":"geometric","n":2,"d":1,"points":[[0.5],[3, 1]],"dist_matrix":null,"sets":null,
            "rects":[{"lo":[0],"hi":[1]}]}"#;
        assert!(matches!(instance_from_json(bad_dim), Err(Error::Dimension { .. })));
        let empty = r#"{"kind":"general","n":1,"d":null,"points":[[0]],"dist_matrix":null,"sets":[],"rects":null}"#;
        assert!(matches!(instance_from_json(empty), Err(Error::EmptyFamily)));
        assert!(matches!(instance_from_json("{not json"), Err(Error::Json(_))));
    }

    #[test]
    fn triangle_violation_names_triple() {
        let m = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        match GeneralInstance::new(Metric::Matrix(m), vec![vec![0, 1, 2]]) {
            Err(Error::Triangle(i, j, k)) => assert_eq!((i, j, k), (0, 1, 2)),
            other => panic!("expected triangle error, got {other:?}"),
        }
    }

    #[test]
    fn rect_containment_is_closed_and_open_at_infinity() {
        let r = Rect::new(vec![Bound::Finite(0.0), Bound::NegInf], vec![Bound::Finite(1.0), Bound::PosInf]);
        assert!(r.contains(&[0.0, -1e300]));
        assert!(r.contains(&[1.0, 5.0]));
        assert!(!r.contains(&[1.0000001, 5.0]));
    }
}
