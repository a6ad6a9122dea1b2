//! Multiplicative-weights feasibility solver for the covering LP
//!
//! ```text
//!   sum_{l in S_i} x_l + sum_{j in L_i} y_j >= 1   for every row i
//!   sum x <= k,  sum y <= z,  0 <= x, y <= 1
//! ```
//!
//! Each round the oracle maximizes the weighted constraint over the
//! polytope by picking the top-k and top-z coefficients; rows are then
//! reweighted by `1 - delta_i eps / 4`. Either some round proves the system
//! infeasible, or the average of the oracle answers satisfies every row up
//! to additive `eps`.

use crate::constants::MWU_C;

/// A covering system the engine can query. Rows are coverage constraints,
/// x-slots are candidate centers and y-slots are outlier sets.
pub trait CoverageSystem {
    fn num_rows(&self) -> usize;
    fn num_x(&self) -> usize;
    fn num_y(&self) -> usize;

    /// `sigma^T A`, split into x and y coefficients.
    fn coefficients(&mut self, sigma: &[f64]) -> (Vec<f64>, Vec<f64>);

    /// `A_i psi` for every row, where `psi` is the 0/1 vector selecting
    /// x-slots `xs` and y-slots `ys`.
    fn row_values(&mut self, xs: &[usize], ys: &[usize]) -> Vec<f64>;

    /// `A_i psi` for a fractional vector.
    fn row_values_frac(&mut self, x: &[f64], y: &[f64]) -> Vec<f64>;
}

/// Explicit-matrix system: `balls[i]` lists the x-slots of row `i`,
/// `member[i]` its y-slots.
#[derive(Clone, Debug)]
pub struct DenseSystem {
    pub nx: usize,
    pub ny: usize,
    pub balls: Vec<Vec<usize>>,
    pub member: Vec<Vec<usize>>,
}

impl CoverageSystem for DenseSystem {
    fn num_rows(&self) -> usize {
        self.balls.len()
    }

    fn num_x(&self) -> usize {
        self.nx
    }

    fn num_y(&self) -> usize {
        self.ny
    }

    fn coefficients(&mut self, sigma: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut w = vec![0.0; self.nx];
        let mut tau = vec![0.0; self.ny];
        for i in 0..self.balls.len() {
            for &l in &self.balls[i] {
                w[l] += sigma[i];
            }
            for &j in &self.member[i] {
                tau[j] += sigma[i];
            }
        }
        (w, tau)
    }

    fn row_values(&mut self, xs: &[usize], ys: &[usize]) -> Vec<f64> {
        let mut x = vec![0.0; self.nx];
        let mut y = vec![0.0; self.ny];
        xs.iter().for_each(|&l| x[l] = 1.0);
        ys.iter().for_each(|&j| y[j] = 1.0);
        self.row_values_frac(&x, &y)
    }

    fn row_values_frac(&mut self, x: &[f64], y: &[f64]) -> Vec<f64> {
        (0..self.balls.len())
            .map(|i| self.balls[i].iter().map(|&l| x[l]).sum::<f64>() + self.member[i].iter().map(|&j| y[j]).sum::<f64>())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MwuConfig {
    /// Constant in the budget `ceil(c (k+z) ln n / eps^2)`.
    pub c: f64,
    /// Stop as soon as the running average already meets every row to
    /// within `eps`.
    pub early_exit: bool,
}

impl Default for MwuConfig {
    fn default() -> Self {
        MwuConfig { c: MWU_C, early_exit: true }
    }
}

/// Iteration budget `max(1, ceil(c (k+z) ln n / eps^2))`.
pub fn iteration_budget(n: usize, k: usize, z: usize, eps: f64, c: f64) -> usize {
    let t = (c * (k + z) as f64 * (n.max(1) as f64).ln() / (eps * eps)).ceil();
    (t as usize).max(1)
}

/// The averaged solution and how it was reached.
#[derive(Clone, Debug, PartialEq)]
pub struct MwuSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub iterations: usize,
    pub budget: usize,
    /// `min_i A_i psi`, evaluated directly on the returned vector.
    pub min_coverage: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MwuOutcome {
    Feasible(MwuSolution),
    /// The oracle found no point of the polytope meeting the weighted
    /// constraint in this round.
    Infeasible { iteration: usize },
}

impl MwuOutcome {
    pub fn feasible(self) -> Option<MwuSolution> {
        match self {
            MwuOutcome::Feasible(s) => Some(s),
            MwuOutcome::Infeasible { .. } => None,
        }
    }
}

fn top(values: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(count.min(values.len()));
    idx.sort_unstable();
    idx
}

/// Selection answering one oracle call.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleChoice {
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    /// Weighted left-hand side of the chosen vector.
    pub value: f64,
}

/// Picks the top-k x and top-z y coefficients (weight desc, index asc).
/// Returns `None` when even this maximizer misses the weighted right-hand
/// side `sigma_total`.
pub fn oracle_step(w: &[f64], tau: &[f64], sigma_total: f64, k: usize, z: usize) -> Option<OracleChoice> {
    let xs = top(w, k);
    let ys = top(tau, z);
    let value = xs.iter().map(|&l| w[l]).sum::<f64>() + ys.iter().map(|&j| tau[j]).sum::<f64>();
    // Relative slack absorbs summation-order rounding only.
    if value >= sigma_total * (1.0 - 1e-12) {
        Some(OracleChoice { xs, ys, value })
    } else {
        None
    }
}

/// Reweights rows in place: `sigma_i *= 1 - delta_i eps / 4` with
/// `delta_i = (A_i psi - 1) / (k + z)`.
pub fn update_step(sigma: &mut [f64], rows: &[f64], k: usize, z: usize, eps: f64) {
    let xi = (k + z) as f64;
    let mut max: f64 = 0.0;
    for (s, &a) in sigma.iter_mut().zip(rows) {
        let delta = (a - 1.0) / xi;
        *s *= 1.0 - delta * eps / 4.0;
        max = max.max(*s);
    }
    if max < 1e-300 {
        let inv = 1.0 / max;
        sigma.iter_mut().for_each(|s| *s *= inv);
    } else if max > 1e300 {
        sigma.iter_mut().for_each(|s| *s /= max);
    }
}

/// Normalized copy of the raw weights.
pub fn normalized(sigma: &[f64]) -> Vec<f64> {
    let s: f64 = sigma.iter().sum();
    sigma.iter().map(|v| v / s).collect()
}

/// Runs the engine on `sys`.
pub fn mwu_solve<S: CoverageSystem>(sys: &mut S, k: usize, z: usize, eps: f64, cfg: &MwuConfig) -> MwuOutcome {
    let n = sys.num_rows();
    let (nx, ny) = (sys.num_x(), sys.num_y());
    let budget = iteration_budget(n, k, z, eps, cfg.c);
    if n == 0 {
        return MwuOutcome::Feasible(MwuSolution { x: vec![0.0; nx], y: vec![0.0; ny], iterations: 0, budget, min_coverage: f64::INFINITY });
    }
    let mut sigma = vec![1.0; n];
    let mut acc_x = vec![0.0; nx];
    let mut acc_y = vec![0.0; ny];
    let mut cum = vec![0.0; n];
    let mut t = 0;
    while t < budget {
        let (w, tau) = sys.coefficients(&sigma);
        let total: f64 = sigma.iter().sum();
        let Some(choice) = oracle_step(&w, &tau, total, k, z) else {
            return MwuOutcome::Infeasible { iteration: t };
        };
        choice.xs.iter().for_each(|&l| acc_x[l] += 1.0);
        choice.ys.iter().for_each(|&j| acc_y[j] += 1.0);
        let rows = sys.row_values(&choice.xs, &choice.ys);
        for (c, a) in cum.iter_mut().zip(&rows) {
            *c += a;
        }
        update_step(&mut sigma, &rows, k, z, eps);
        t += 1;
        if cfg.early_exit && cum.iter().all(|&c| c / t as f64 >= 1.0 - eps) {
            break;
        }
    }
    let x: Vec<f64> = acc_x.iter().map(|v| v / t as f64).collect();
    let y: Vec<f64> = acc_y.iter().map(|v| v / t as f64).collect();
    let min_coverage = sys.row_values_frac(&x, &y).into_iter().fold(f64::INFINITY, f64::min);
    MwuOutcome::Feasible(MwuSolution { x, y, iterations: t, budget, min_coverage })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single() -> DenseSystem {
        DenseSystem { nx: 1, ny: 1, balls: vec![vec![0]], member: vec![vec![0]] }
    }

    #[test]
    fn single_point_covers_itself() {
        let mut s = single();
        let (w, tau) = s.coefficients(&[1.0]);
        assert_eq!(w, vec![1.0]);
        assert_eq!(tau, vec![1.0]);
        assert!(oracle_step(&w, &tau, 1.0, 1, 1).is_some());
    }

    #[test]
    fn zero_selection_rescales_uniformly() {
        let mut sigma = vec![0.2, 0.3, 0.5];
        update_step(&mut sigma, &[0.0, 0.0, 0.0], 1, 1, 0.5);
        let n = normalized(&sigma);
        for (a, b) in n.iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn delta_of_double_cover() {
        let mut s = single();
        let rows = s.row_values(&[0], &[0]);
        assert_eq!(rows, vec![2.0]);
        assert_eq!((rows[0] - 1.0) / 2.0, 0.5);
    }

    #[test]
    fn far_pair_at_zero_radius() {
        // Two far points, one rectangle each: center one, drop the other.
        let mut s = DenseSystem { nx: 2, ny: 2, balls: vec![vec![0], vec![1]], member: vec![vec![0], vec![1]] };
        let sol = mwu_solve(&mut s, 1, 1, 0.2, &MwuConfig::default()).feasible().unwrap();
        assert!(sol.min_coverage >= 0.8);
        assert!(sol.x.iter().sum::<f64>() <= 1.0 + 1e-12);
    }

    #[test]
    fn infeasible_detected() {
        // Three isolated rows, one center and one set cannot cover all.
        let mut s = DenseSystem { nx: 3, ny: 3, balls: vec![vec![0], vec![1], vec![2]], member: vec![vec![0], vec![1], vec![2]] };
        assert!(matches!(mwu_solve(&mut s, 1, 1, 0.1, &MwuConfig::default()), MwuOutcome::Infeasible { .. }));
    }

    #[test]
    fn budget_floor() {
        assert_eq!(iteration_budget(1, 1, 1, 0.1, 8.0), 1);
        assert_eq!(iteration_budget(10, 1, 1, 0.5, 8.0), (64.0 * 10f64.ln()).ceil() as usize);
    }
}
