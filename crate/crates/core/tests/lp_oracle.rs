//! The coverage engine against an exact rational LP feasibility check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use setout_core::cso_general::dense_system;
use setout_core::gen::random_general;
use setout_core::metric::enumerate_radii;
use setout_core::mwu::{mwu_solve, MwuConfig, MwuOutcome};
use setout_core::SetSystem;

type Q = BigRational;

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Phase one of the simplex method with Bland's rule: is
/// `{v >= 0 : A v = b}` nonempty? Requires `b >= 0`.
fn feasible(a: &[Vec<Q>], b: &[Q]) -> bool {
    let (rows, cols) = (a.len(), a[0].len());
    let width = cols + rows;
    let mut t: Vec<Vec<Q>> = (0..rows)
        .map(|i| {
            let mut r = a[i].clone();
            r.extend((0..rows).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut basis: Vec<usize> = (cols..width).collect();
    // Reduced costs of the artificial objective.
    let mut cost: Vec<Q> = (0..=width).map(|j| if j >= cols && j < width { Q::zero() } else { -t.iter().map(|r| r[j].clone()).sum::<Q>() }).collect();
    while let Some(e) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Q)> = None;
        for (i, r) in t.iter().enumerate() {
            if r[e].is_positive() {
                let ratio = &r[width] / &r[e];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leave else {
            // Unbounded direction; cannot happen for a bounded-below objective.
            unreachable!("phase one objective is bounded");
        };
        let piv = t[l][e].clone();
        t[l].iter_mut().for_each(|v| *v /= &piv);
        let prow = t[l].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != l && !r[e].is_zero() {
                let f = r[e].clone();
                r.iter_mut().zip(&prow).for_each(|(v, p)| *v -= &f * p);
            }
        }
        let f = cost[e].clone();
        cost.iter_mut().zip(&prow).for_each(|(v, p)| *v -= &f * p);
        basis[l] = e;
    }
    // The remaining artificial mass is minus the objective value.
    cost[width].is_zero()
}

/// `sum_{l in B(i, r)} x_l + sum_{j ni i} y_j >= rhs`, `sum x <= k`,
/// `sum y <= z`, `0 <= x, y <= 1`, in equality form.
fn coverage_lp(inst: &dyn SetSystem, r: f64, k: usize, z: usize, rhs: &Q) -> (Vec<Vec<Q>>, Vec<Q>) {
    let (n, m) = (inst.len(), inst.num_sets());
    let nv = n + m;
    // Columns: x, y, row surplus, two budget slacks, upper-bound slacks.
    let cols = nv + n + 2 + nv;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let mut row = vec![Q::zero(); cols];
        for l in 0..n {
            if inst.dist(i, l) <= r {
                row[l] = Q::one();
            }
        }
        for &j in inst.sets_of(i) {
            row[n + j] = Q::one();
        }
        row[nv + i] = q(-1);
        a.push(row);
        b.push(rhs.clone());
    }
    for (range, slack, cap) in [(0..n, nv + n, k), (n..nv, nv + n + 1, z)] {
        let mut row = vec![Q::zero(); cols];
        range.for_each(|v| row[v] = Q::one());
        row[slack] = Q::one();
        a.push(row);
        b.push(q(cap as i64));
    }
    for v in 0..nv {
        let mut row = vec![Q::zero(); cols];
        row[v] = Q::one();
        row[nv + n + 2 + v] = Q::one();
        a.push(row);
        b.push(Q::one());
    }
    (a, b)
}

#[test]
fn simplex_sanity() {
    // x + y = 1 is feasible; x + y = 1 with x + y + s = 0.5 is not.
    assert!(feasible(&[vec![q(1), q(1)]], &[q(1)]));
    let half = Q::new(BigInt::from(1), BigInt::from(2));
    assert!(!feasible(&[vec![q(1), q(1), q(0)], vec![q(1), q(1), q(1)]], &[q(1), half]));
}

#[test]
fn engine_agrees_with_exact_lp() {
    let eps = 0.1;
    let cfg = MwuConfig::default();
    let relaxed = Q::one() - Q::from_float(eps).unwrap();
    let (mut yes, mut no) = (0, 0);
    for seed in 0..40u64 {
        let n = 4 + (seed % 4) as usize;
        let m = 1 + (seed % 3) as usize;
        let inst = random_general(seed, n, m, 2, 2).unwrap();
        let (k, z) = (1 + (seed % 2) as usize, 1);
        let elems: Vec<usize> = (0..n).collect();
        let sets: Vec<usize> = (0..m).collect();
        for &r in &enumerate_radii(&inst).values {
            let mut sys = dense_system(&inst, &elems, &sets, r);
            let exact = {
                let (a, b) = coverage_lp(&inst, r, k, z, &Q::one());
                feasible(&a, &b)
            };
            match mwu_solve(&mut sys, k, z, eps, &cfg) {
                MwuOutcome::Infeasible { .. } => {
                    no += 1;
                    assert!(!exact, "seed {seed} r {r}: engine refused a feasible LP");
                }
                MwuOutcome::Feasible(_) => {
                    yes += 1;
                    // Acceptance certifies the relaxed LP, so it must be feasible.
                    let (a, b) = coverage_lp(&inst, r, k, z, &relaxed);
                    assert!(feasible(&a, &b), "seed {seed} r {r}: engine accepted an infeasible relaxed LP");
                }
            }
        }
    }
    assert!(yes > 0 && no > 0, "only one outcome exercised: {yes} accepted, {no} refused");
}
