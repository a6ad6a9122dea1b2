//! Radius multipliers, epsilon budgets and tunable defaults, kept in one
//! place so solvers and tests read the same numbers.

/// Radius multipliers used by the disjoint coreset pipelines, as multiples
/// of the current radius guess.
pub mod radius {
    /// Per-set Gonzalez acceptance and within-set dedup distance.
    pub const PRUNE: f64 = 2.0;
    /// Ball whose set-count decides a dense extraction.
    pub const DENSE: f64 = 10.0;
    /// Ball removed on a dense extraction.
    pub const EXTRACT: f64 = 15.0;
    /// Peeling radius when rounding the coreset LP (twice `DENSE`).
    pub const COARSE_PEEL: f64 = 20.0;
    /// Cost factor stated for the disjoint pipeline.
    pub const DISJOINT_COST: f64 = 30.0;
    /// Worst-case chain actually provable for our disjoint pipeline:
    /// a pruned element sits within 4r of a kept one, which is then within
    /// 30r of a representative.
    pub const DISJOINT_CHAIN: f64 = 34.0;
    /// Charikar peeling multiplier.
    pub const CHARIKAR_PEEL: f64 = 3.0;
}

/// Default LP slack for the general set-outlier solver.
pub const EPS_LP: f64 = 0.05;
/// Constant in the MWU iteration budget `ceil(c (k+z) ln n / eps^2)`.
pub const MWU_C: f64 = 8.0;
/// Multiplier hidden in the RCRO sample size.
pub const RCRO_TAU_MULT: f64 = 4.0;
/// Multiplier hidden in the RCTO trial count `2^(gk+z) ln N`.
pub const RCTO_TRIAL_MULT: f64 = 1.0;
/// Refuse RCTO runs needing more trials than this.
pub const RCTO_TRIAL_CAP: usize = 1 << 16;
/// Refuse exhaustive enumerations larger than this.
pub const BRUTE_FORCE_CAP: u64 = 2_000_000;
/// Refuse join materializations larger than this.
pub const MATERIALIZE_CAP: usize = 1 << 22;

/// How the user-facing epsilon is divided among the approximation sources
/// of one solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsBudget {
    /// Additive slack of the MWU coverage constraints.
    pub mwu: f64,
    /// BBD ball-query inflation.
    pub bbd: f64,
    /// Relative error of the candidate-distance list.
    pub wspd: f64,
    /// Sampling slack (RCRO only).
    pub sample: f64,
}

impl EpsBudget {
    /// Geometric solver: 2k/(1-2 eps/6) <= (2+eps)k and
    /// 2(1+eps/8)^3 <= 2+eps for eps in (0,1).
    pub fn gcso(eps: f64) -> EpsBudget {
        EpsBudget { mwu: eps / 6.0, bbd: eps / 8.0, wspd: eps / 8.0, sample: 0.0 }
    }

    /// Disjoint geometric solver: eps/6 everywhere.
    pub fn gcso_disjoint(eps: f64) -> EpsBudget {
        EpsBudget { mwu: eps / 6.0, bbd: eps / 6.0, wspd: eps / 6.0, sample: 0.0 }
    }

    /// RCRO: (3+eps/10)(1+eps/10)^2 <= 3+eps for eps in (0,1); the sample
    /// acceptance test uses the full eps.
    pub fn rcro(eps: f64) -> EpsBudget {
        let e = eps / 10.0;
        EpsBudget { mwu: 0.0, bbd: e, wspd: e, sample: eps }
    }
}

/// Pinned cost factor of the disjoint geometric solver against the optimum:
/// pruned points within 4r of a kept point, coreset balls of radius
/// 15(1+e)^2 r, and a candidate list overshooting by (1+e).
pub fn gcso_disjoint_cost_factor(eps: f64) -> f64 {
    let b = EpsBudget::gcso_disjoint(eps);
    (4.0 + 2.0 * radius::EXTRACT * (1.0 + b.bbd).powi(2)) * (1.0 + b.wspd)
}

/// Pinned cost factor of the RCTO1 solver: a result is within (2+eps)r of
/// its tuple's oracle centers, those are within 30(1+e)^2 r of a
/// representative, and the scaled L-infinity candidate list overshoots
/// the Euclidean optimum by at most sqrt(d).
pub fn rcto1_cost_factor(eps: f64, d: usize) -> f64 {
    let b = EpsBudget::gcso_disjoint(eps);
    (2.0 + eps + 2.0 * radius::EXTRACT * (1.0 + b.bbd).powi(2)) * (d as f64).sqrt()
}

/// Cost factor of the FPT RCTO solver.
pub fn rcto_cost_factor(d: usize) -> f64 {
    let d = d as f64;
    2.0 * (d + 6.0 * d.sqrt())
}
