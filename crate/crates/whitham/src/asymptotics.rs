//! Closed-form bifurcation constants and small-amplitude expansions.
//!
//! For the principal (`k = 1`) branch both equations admit a second-order
//! expansion around the bifurcation point,
//!
//! ```text
//! φ(ε) = ε cos x + ε² (C₁/2 + C₂ cos 2x) + O(ε³),
//! μ(ε) = μ* + ε² (C₁ + C₂) + O(ε³),
//! ```
//!
//! with model-specific constants.  These serve double duty as initial
//! guesses for the first Newton solve and as independent oracles: a computed
//! wave of amplitude ε must match the expansion to `O(ε³)`.

use crate::spectral::DispersionModel;

/// Second-order expansion constants at the `k = 1` bifurcation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCoefficients {
    pub model: DispersionModel,
    /// Bifurcation speed μ*.
    pub mu_star: f64,
    /// Coefficient C₁; the mean correction is ε²·C₁/2.
    pub c1: f64,
    /// Coefficient C₂ of the ε²·cos(2x) term.
    pub c2: f64,
}

impl ExpansionCoefficients {
    /// `μ(ε) = μ* + ε²(C₁ + C₂)`.
    pub fn speed_at(&self, eps: f64) -> f64 {
        self.mu_star + eps * eps * (self.c1 + self.c2)
    }

    /// Evaluate `φ(ε)` at the given points.
    pub fn profile_at(&self, eps: f64, points: &[f64]) -> Vec<f64> {
        points
            .iter()
            .map(|&x| {
                eps * x.cos() + eps * eps * (0.5 * self.c1 + self.c2 * (2.0 * x).cos())
            })
            .collect()
    }
}

/// Whitham constants: `μ* = sqrt(tanh 1)`, `C₁ = 1/(μ* − 1)`,
/// `C₂ = 1/(2μ* − sqrt(2 tanh 2))`.
///
/// Numerically `μ* ≈ 0.8727`, `C₁ ≈ −7.855`, `C₂ ≈ +2.802`; the branch is
/// subcritical since `C₁ + C₂ ≈ −5.053 < 0`.
pub fn whitham_coefficients() -> ExpansionCoefficients {
    let mu_star = 1.0_f64.tanh().sqrt();
    let c1 = 1.0 / (mu_star - 1.0);
    let c2 = 1.0 / (2.0 * mu_star - (2.0 * 2.0_f64.tanh()).sqrt());
    ExpansionCoefficients {
        model: DispersionModel::Whitham,
        mu_star,
        c1,
        c2,
    }
}

/// KdV constants in the same packaging: `μ* = 5/6`, `C₁ = −6`, `C₂ = 1`,
/// reproducing `φ(ε) = ε cos x + ε²(cos 2x − 3)`.
pub fn kdv_coefficients() -> ExpansionCoefficients {
    ExpansionCoefficients {
        model: DispersionModel::KdvNonlocal,
        mu_star: 5.0 / 6.0,
        c1: -6.0,
        c2: 1.0,
    }
}

/// Whitham expansion sampled at `points`: returns `(φ(ε), μ(ε))`.
pub fn whitham_expansion(eps: f64, points: &[f64]) -> (Vec<f64>, f64) {
    let c = whitham_coefficients();
    (c.profile_at(eps, points), c.speed_at(eps))
}

/// KdV profile expansion `ε cos x + ε²(cos 2x − 3)` sampled at `points`.
pub fn kdv_expansion(eps: f64, points: &[f64]) -> Vec<f64> {
    kdv_coefficients().profile_at(eps, points)
}
