//! Residual, Jacobian and Newton iterations for the steady collocation
//! system
//!
//! ```text
//! -μ φ + φ² + K φ = 0          (Whitham)
//! -μ φ + L(μ)(φ + φ²) = 0      (nonlocal KdV)
//! ```
//!
//! enforced at the collocation points.  The quadratic term is taken
//! pointwise on the grid (pseudo-spectral, no dealiasing).  Solves come in
//! two flavors: fixed speed, and fixed waveheight where the speed μ joins
//! the unknowns and the crest-minus-trough height supplies the extra
//! equation.  The height is a linear functional of the collocation values,
//! so the augmented Jacobian needs no differentiation of a max.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::spectral::{
    cosine_analysis, cosine_synthesis, operator_matrix, operator_matrix_dmu, pointwise_square,
    CollocationGrid, CosineSpectrum, DispersionModel, SpectralError,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("jacobian is singular at newton iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// An even periodic wave: dispersion model, branch index `k`, speed and
/// cosine coefficients on its native grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    model: DispersionModel,
    fundamental: u32,
    mu: f64,
    spectrum: CosineSpectrum,
}

impl WaveProfile {
    pub fn new(model: DispersionModel, fundamental: u32, mu: f64, spectrum: CosineSpectrum) -> Self {
        assert!(fundamental >= 1);
        WaveProfile {
            model,
            fundamental,
            mu,
            spectrum,
        }
    }

    pub fn from_values(
        model: DispersionModel,
        fundamental: u32,
        mu: f64,
        values: &[f64],
    ) -> Result<Self, SpectralError> {
        Ok(WaveProfile::new(model, fundamental, mu, cosine_analysis(values)?))
    }

    pub fn model(&self) -> DispersionModel {
        self.model
    }

    pub fn fundamental(&self) -> u32 {
        self.fundamental
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn spectrum(&self) -> &CosineSpectrum {
        &self.spectrum
    }

    pub fn n_points(&self) -> usize {
        self.spectrum.n_modes()
    }

    pub fn grid(&self) -> CollocationGrid {
        CollocationGrid::new(self.n_points())
    }

    /// Collocation values on the native grid.
    pub fn values(&self) -> Vec<f64> {
        cosine_synthesis(&self.spectrum, self.grid().points())
    }

    /// Evaluate the cosine series at arbitrary points.
    pub fn evaluate(&self, points: &[f64]) -> Vec<f64> {
        cosine_synthesis(&self.spectrum, points)
    }

    /// Crest value φ(0).
    pub fn crest(&self) -> f64 {
        self.evaluate(&[0.0])[0]
    }

    /// Largest value over crest and collocation points.  For the waves on
    /// the tracked branches the crest at x = 0 is the maximum.
    pub fn max_value(&self) -> f64 {
        self.values()
            .into_iter()
            .fold(self.crest(), f64::max)
    }

    /// Grid average, which equals the l = 0 cosine mode up to scaling.
    pub fn mean(&self) -> f64 {
        self.spectrum.mode_amplitude(0)
    }

    /// Interpolate onto an `n`-point grid (zero-padding when refining).
    pub fn resampled(&self, n: usize) -> WaveProfile {
        let grid = CollocationGrid::new(n);
        let values = self.evaluate(grid.points());
        // Interpolation of a cosine series is exact, so analysis on the new
        // grid cannot fail for n >= 2.
        WaveProfile::from_values(self.model, self.fundamental, self.mu, &values)
            .expect("resampling onto a valid grid")
    }
}

/// Crest-to-trough height `φ(0) − φ(π/k)` of a `k`-fundamental wave.
pub fn waveheight(profile: &WaveProfile) -> f64 {
    let trough = std::f64::consts::PI / profile.fundamental() as f64;
    let v = profile.evaluate(&[0.0, trough]);
    v[0] - v[1]
}

/// Convergence diagnostics of one Newton run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub converged: bool,
    /// Number of Newton updates taken.
    pub iterations: usize,
    /// Sup-norm of the residual before each update, plus the accepted value.
    pub residual_norms: Vec<f64>,
    /// Cheap lower bound on the infinity-norm condition number of the last
    /// factored Jacobian.
    pub condition_estimate: Option<f64>,
}

impl SolverReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_norms.last().copied().unwrap_or(f64::NAN)
    }
}

/// Knobs for the Newton iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Sup-norm tolerance on the collocation residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Optional halving line search; plain Newton is the default and
    /// suffices on the tracked branches.
    pub line_search: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-12,
            max_iter: 50,
            line_search: false,
        }
    }
}

/// Steady operator context: grid plus the dense multiplier matrix, rebuilt
/// only when the speed changes (the Whitham operator is speed-independent).
struct SteadyContext {
    model: DispersionModel,
    grid: CollocationGrid,
    mu: f64,
    op: DMatrix<f64>,
}

impl SteadyContext {
    fn new(model: DispersionModel, n: usize, mu: f64) -> Result<Self, SpectralError> {
        let grid = CollocationGrid::new(n);
        let op = operator_matrix(model, &grid, Some(mu))?;
        Ok(SteadyContext {
            model,
            grid,
            mu,
            op,
        })
    }

    fn set_mu(&mut self, mu: f64) -> Result<(), SpectralError> {
        if mu != self.mu {
            self.mu = mu;
            if self.model.speed_dependent() {
                self.op = operator_matrix(self.model, &self.grid, Some(mu))?;
            }
        }
        Ok(())
    }

    fn residual(&self, v: &DVector<f64>) -> DVector<f64> {
        let sq = pointwise_square(v);
        match self.model {
            DispersionModel::Whitham => &self.op * v - v * self.mu + sq,
            DispersionModel::KdvNonlocal => &self.op * (v + sq) - v * self.mu,
        }
    }

    fn jacobian(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let n = v.len();
        match self.model {
            DispersionModel::Whitham => {
                let mut j = self.op.clone();
                for i in 0..n {
                    j[(i, i)] += 2.0 * v[i] - self.mu;
                }
                j
            }
            DispersionModel::KdvNonlocal => {
                // L (I + 2 diag(v)) - mu I: scale column j by (1 + 2 v_j).
                let mut j = self.op.clone();
                for (jcol, mut col) in j.column_iter_mut().enumerate() {
                    col *= 1.0 + 2.0 * v[jcol];
                }
                for i in 0..n {
                    j[(i, i)] -= self.mu;
                }
                j
            }
        }
    }

    /// d(residual)/dμ at fixed values.
    fn residual_dmu(&self, v: &DVector<f64>) -> Result<DVector<f64>, SpectralError> {
        match self.model {
            DispersionModel::Whitham => Ok(-v),
            DispersionModel::KdvNonlocal => {
                let dop = operator_matrix_dmu(self.model, &self.grid, Some(self.mu))?;
                Ok(dop * (v + pointwise_square(v)) - v)
            }
        }
    }
}

/// Collocation residual of the steady equation at the grid points.
pub fn residual(values: &[f64], mu: f64, model: DispersionModel) -> Result<Vec<f64>, SpectralError> {
    let ctx = SteadyContext::new(model, values.len(), mu)?;
    Ok(ctx
        .residual(&DVector::from_column_slice(values))
        .as_slice()
        .to_vec())
}

/// Analytic Jacobian of [`residual`] with respect to the values.
pub fn jacobian(values: &[f64], mu: f64, model: DispersionModel) -> Result<DMatrix<f64>, SpectralError> {
    let ctx = SteadyContext::new(model, values.len(), mu)?;
    Ok(ctx.jacobian(&DVector::from_column_slice(values)))
}

/// Galilean shift `φ ↦ φ + γ, μ ↦ μ + 2γ`; returns the shifted values, the
/// shifted speed and the induced constant of integration `γ(1 − μ − γ)`.
pub fn galilean_shift(values: &[f64], mu: f64, gamma: f64) -> (Vec<f64>, f64, f64) {
    let shifted = values.iter().map(|&v| v + gamma).collect();
    (shifted, mu + 2.0 * gamma, gamma * (1.0 - mu - gamma))
}

fn condition_estimate(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, norm_inf: f64) -> Option<f64> {
    let n = lu.l().nrows();
    let ones = DVector::from_element(n, 1.0);
    lu.solve(&ones).map(|x| norm_inf * x.amax())
}

fn matrix_norm_inf(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Newton iteration at fixed speed μ.
///
/// Non-convergence is not an error: the report comes back with
/// `converged = false` and callers decide.  Only a singular linear solve
/// aborts.
pub fn newton_fixed_speed(
    initial: &[f64],
    mu: f64,
    model: DispersionModel,
    fundamental: u32,
    opts: &NewtonOptions,
) -> Result<(WaveProfile, SolverReport), SolveError> {
    let ctx = SteadyContext::new(model, initial.len(), mu)?;
    let mut v = DVector::from_column_slice(initial);
    let mut norms = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut cond = None;

    loop {
        let r = ctx.residual(&v);
        let norm = r.amax();
        norms.push(norm);
        if norm.is_finite() && norm <= opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter || !norm.is_finite() {
            break;
        }
        let j = ctx.jacobian(&v);
        let jnorm = matrix_norm_inf(&j);
        let lu = j.lu();
        let step = lu.solve(&r).ok_or(SolveError::SingularJacobian {
            iteration: iterations,
        })?;
        cond = condition_estimate(&lu, jnorm);
        if opts.line_search {
            let mut scale = 1.0;
            for _ in 0..8 {
                let trial = &v - &step * scale;
                if ctx.residual(&trial).amax() < norm {
                    break;
                }
                scale *= 0.5;
            }
            v -= step * scale;
        } else {
            v -= step;
        }
        iterations += 1;
    }

    let profile = WaveProfile::from_values(model, fundamental, mu, v.as_slice())?;
    let report = SolverReport {
        converged,
        iterations,
        residual_norms: norms,
        condition_estimate: cond,
    };
    Ok((profile, report))
}

/// Row vector of the linear height functional: `h(φ) = Σ_n c_n φ(x_n)` with
/// `c_n = Σ_l w²(l) (1 − cos(lπ/k)) cos(l x_n)`.
fn height_row(grid: &CollocationGrid, fundamental: u32) -> DVector<f64> {
    let n = grid.len();
    let trough = std::f64::consts::PI / fundamental as f64;
    let w2 = |l: usize| if l == 0 { 1.0 / n as f64 } else { 2.0 / n as f64 };
    DVector::from_iterator(
        n,
        grid.points().iter().map(|&x| {
            (0..n)
                .map(|l| w2(l) * (1.0 - (l as f64 * trough).cos()) * (l as f64 * x).cos())
                .sum()
        }),
    )
}

/// Newton iteration on the augmented system `{residual = 0, height = target}`
/// with unknowns `(φ, μ)`.  Returns the profile carrying the solved speed.
pub fn newton_fixed_height(
    initial: &[f64],
    mu0: f64,
    target_height: f64,
    model: DispersionModel,
    fundamental: u32,
    opts: &NewtonOptions,
) -> Result<(WaveProfile, SolverReport), SolveError> {
    let n = initial.len();
    let mut ctx = SteadyContext::new(model, n, mu0)?;
    let hrow = height_row(&ctx.grid, fundamental);
    let mut v = DVector::from_column_slice(initial);
    let mut mu = mu0;
    let mut norms = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut cond = None;

    loop {
        let r = ctx.residual(&v);
        let hdev = hrow.dot(&v) - target_height;
        let norm = r.amax().max(hdev.abs());
        norms.push(norm);
        if norm.is_finite() && norm <= opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter || !norm.is_finite() {
            break;
        }

        // Assemble the bordered system [J, dr/dmu; h', 0].
        let j = ctx.jacobian(&v);
        let dmu = ctx.residual_dmu(&v)?;
        let mut aug = DMatrix::zeros(n + 1, n + 1);
        aug.view_mut((0, 0), (n, n)).copy_from(&j);
        aug.view_mut((0, n), (n, 1)).copy_from(&dmu);
        aug.view_mut((n, 0), (1, n)).copy_from(&hrow.transpose());
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(&r);
        rhs[n] = hdev;

        let augnorm = matrix_norm_inf(&aug);
        let lu = aug.lu();
        let step = lu.solve(&rhs).ok_or(SolveError::SingularJacobian {
            iteration: iterations,
        })?;
        cond = condition_estimate(&lu, augnorm);
        v -= step.rows(0, n);
        mu -= step[n];
        iterations += 1;
        if mu <= 0.0 {
            // Left the admissible speed range; report as non-convergence.
            break;
        }
        ctx.set_mu(mu)?;
    }

    let profile = WaveProfile::from_values(model, fundamental, mu, v.as_slice())?;
    let report = SolverReport {
        converged,
        iterations,
        residual_norms: norms,
        condition_estimate: cond,
    };
    Ok((profile, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics;
    use approx::assert_abs_diff_eq;

    const MU1: f64 = 0.872_693_620_897_829_6;

    fn pseudo_random(n: usize, scale: f64) -> Vec<f64> {
        (0..n)
            .map(|i| scale * ((i as f64 * 12.9898).sin() * 43758.5453).fract())
            .collect()
    }

    #[test]
    fn residual_vanishes_on_trivial_and_constant_solutions() {
        let zeros = vec![0.0; 16];
        for r in residual(&zeros, 0.7, DispersionModel::Whitham).unwrap() {
            assert_eq!(r, 0.0);
        }
        let mu = 0.9;
        let constant = vec![mu - 1.0; 16];
        for r in residual(&constant, mu, DispersionModel::Whitham).unwrap() {
            assert_abs_diff_eq!(r, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn residual_of_cos_at_bifurcation_point_is_quadratic() {
        let n = 16;
        let grid = CollocationGrid::new(n);
        let eps = 0.05;
        let values: Vec<f64> = grid.points().iter().map(|&x| eps * x.cos()).collect();
        let r = residual(&values, MU1, DispersionModel::Whitham).unwrap();
        for (&x, &ri) in grid.points().iter().zip(&r) {
            let expected = eps * eps * x.cos() * x.cos();
            assert_abs_diff_eq!(ri, expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn jacobian_at_zero_is_operator_minus_mu() {
        let n = 12;
        let mu = 0.8;
        let grid = CollocationGrid::new(n);
        let j = jacobian(&vec![0.0; n], mu, DispersionModel::Whitham).unwrap();
        let k = operator_matrix(DispersionModel::Whitham, &grid, None).unwrap();
        let expected = k - DMatrix::identity(n, n) * mu;
        assert!((j - expected).abs().max() < 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let n = 32;
        let h = 1e-6;
        for (model, mu) in [
            (DispersionModel::Whitham, 0.85),
            (DispersionModel::KdvNonlocal, 0.8),
        ] {
            let v = pseudo_random(n, 0.1);
            let j = jacobian(&v, mu, model).unwrap();
            let mut worst: f64 = 0.0;
            for col in 0..n {
                let mut vp = v.clone();
                let mut vm = v.clone();
                vp[col] += h;
                vm[col] -= h;
                let rp = residual(&vp, mu, model).unwrap();
                let rm = residual(&vm, mu, model).unwrap();
                for row in 0..n {
                    let fd = (rp[row] - rm[row]) / (2.0 * h);
                    worst = worst.max((j[(row, col)] - fd).abs());
                }
            }
            assert!(worst < 1e-6, "model {model:?}: jacobian fd gap {worst}");
        }
    }

    #[test]
    fn jacobian_is_singular_at_bifurcation_point() {
        let n = 16;
        let j = jacobian(&vec![0.0; n], MU1, DispersionModel::Whitham).unwrap();
        let svd = j.clone().svd(true, true);
        let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(smin < 1e-10, "smallest singular value {smin}");
        // Null direction is cos(x_n).
        let grid = CollocationGrid::new(n);
        let v = DVector::from_iterator(n, grid.points().iter().map(|&x| x.cos()));
        assert!((&j * &v).amax() < 1e-10);
    }

    #[test]
    fn kdv_residual_agrees_with_local_form() {
        // Second algebraic route: residual = L(mu) applied to the local form
        // (1-mu) phi + phi^2 + phi''/6, with the derivative taken spectrally.
        let n = 24;
        let mu = 0.77;
        let grid = CollocationGrid::new(n);
        let v = pseudo_random(n, 0.2);
        let spec = cosine_analysis(&v).unwrap();
        let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
        let second: Vec<f64> = {
            let coeffs: Vec<f64> = spec
                .coeffs()
                .iter()
                .enumerate()
                .map(|(l, &c)| -((l * l) as f64) * c)
                .collect();
            cosine_synthesis(&CosineSpectrum::new(coeffs), grid.points())
        };
        let local: Vec<f64> = (0..n)
            .map(|i| (1.0 - mu) * v[i] + sq[i] + second[i] / 6.0)
            .collect();
        let routed = crate::spectral::apply_operator_at_grid(
            &local,
            DispersionModel::KdvNonlocal,
            Some(mu),
        )
        .unwrap();
        let direct = residual(&v, mu, DispersionModel::KdvNonlocal).unwrap();
        for (a, b) in routed.iter().zip(&direct) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
    }

    #[test]
    fn galilean_identity_holds_pointwise() {
        let n = 32;
        let mu = 0.8;
        let gamma = 0.1;
        let v = pseudo_random(n, 0.3);
        let (shifted, mu2, b) = galilean_shift(&v, mu, gamma);
        assert_abs_diff_eq!(b, gamma * (1.0 - mu - gamma), epsilon = 1e-15);
        let r0 = residual(&v, mu, DispersionModel::Whitham).unwrap();
        let r1 = residual(&shifted, mu2, DispersionModel::Whitham).unwrap();
        for (a, c) in r0.iter().zip(&r1) {
            assert_abs_diff_eq!(*c, a + b, epsilon = 1e-12);
        }
        // gamma = 0 and the complementary root leave b = 0.
        assert_eq!(galilean_shift(&v, mu, 0.0).2, 0.0);
        let (_, _, b2) = galilean_shift(&v, mu, 1.0 - mu);
        assert_abs_diff_eq!(b2, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn newton_accepts_exact_constant_immediately() {
        let mu = 0.9;
        let initial = vec![mu - 1.0; 16];
        let (profile, report) =
            newton_fixed_speed(&initial, mu, DispersionModel::Whitham, 1, &NewtonOptions::default())
                .unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 1);
        assert_abs_diff_eq!(profile.values()[3], mu - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn newton_finds_trivial_solution_away_from_bifurcation() {
        let (profile, report) = newton_fixed_speed(
            &[0.0; 16],
            0.5,
            DispersionModel::Whitham,
            1,
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!(report.converged);
        assert!(waveheight(&profile).abs() < 1e-12);
    }

    #[test]
    fn newton_matches_small_amplitude_expansion_to_cubic_order() {
        let n = 32;
        let grid = CollocationGrid::new(n);
        let opts = NewtonOptions::default();
        let mut errors = Vec::new();
        for eps in [0.01, 0.005] {
            let (guess, mu) = asymptotics::whitham_expansion(eps, grid.points());
            let (profile, report) =
                newton_fixed_speed(&guess, mu, DispersionModel::Whitham, 1, &opts).unwrap();
            assert!(report.converged);
            let sol = profile.values();
            let err = guess
                .iter()
                .zip(&sol)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        // O(eps^3): halving eps should shrink the gap by ~8; require >= 2^2.5.
        let ratio = errors[0] / errors[1];
        assert!(ratio >= 5.6, "expansion error ratio {ratio}, errors {errors:?}");
    }

    #[test]
    fn converged_wave_satisfies_mean_identity_and_sign_structure() {
        let n = 32;
        let grid = CollocationGrid::new(n);
        let opts = NewtonOptions::default();
        let (guess, mu) = asymptotics::whitham_expansion(0.05, grid.points());
        let (profile, report) =
            newton_fixed_speed(&guess, mu, DispersionModel::Whitham, 1, &opts).unwrap();
        assert!(report.converged);
        let values = profile.values();
        let mean = values.iter().sum::<f64>() / n as f64;
        let mean_sq = values.iter().map(|v| v * v).sum::<f64>() / n as f64;
        assert!(((1.0 - mu) * mean + mean_sq).abs() <= 10.0 * opts.tol);
        assert!(mean < 0.0);
        assert_abs_diff_eq!(profile.mean(), mean, epsilon = 1e-13);
        // Residual norms strictly decreasing over the final two iterations.
        let norms = &report.residual_norms;
        if norms.len() >= 3 {
            let m = norms.len();
            assert!(norms[m - 1] < norms[m - 2] && norms[m - 2] < norms[m - 3]);
        }
    }

    #[test]
    fn fixed_height_is_consistent_with_fixed_speed() {
        let n = 32;
        let grid = CollocationGrid::new(n);
        let opts = NewtonOptions::default();
        let (guess, mu) = asymptotics::whitham_expansion(0.04, grid.points());
        let (wave, _) = newton_fixed_speed(&guess, mu, DispersionModel::Whitham, 1, &opts).unwrap();
        let h = waveheight(&wave);
        let (refit, report) = newton_fixed_height(
            &wave.values(),
            wave.mu(),
            h,
            DispersionModel::Whitham,
            1,
            &opts,
        )
        .unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 2);
        assert_abs_diff_eq!(refit.mu(), wave.mu(), epsilon = 1e-10);
        assert_abs_diff_eq!(waveheight(&refit), h, epsilon = 1e-12);
    }

    #[test]
    fn pointwise_square_is_alias_free_for_band_limited_input() {
        // phi with modes only below N/2: squaring on the N grid equals the
        // projection of the exact square (oracle on a 2N grid).
        let n = 32;
        let grid = CollocationGrid::new(n);
        let fine = CollocationGrid::new(2 * n);
        let f = |x: f64| 0.3 + 0.2 * x.cos() + 0.05 * (5.0 * x).cos() + 0.01 * (15.0 * x).cos();
        let coarse_sq: Vec<f64> = grid.points().iter().map(|&x| f(x) * f(x)).collect();
        let fine_sq: Vec<f64> = fine.points().iter().map(|&x| f(x) * f(x)).collect();
        let spec_coarse = cosine_analysis(&coarse_sq).unwrap();
        let spec_fine = cosine_analysis(&fine_sq).unwrap();
        for l in 0..n {
            assert_abs_diff_eq!(
                spec_coarse.mode_amplitude(l),
                spec_fine.mode_amplitude(l),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn height_row_matches_waveheight() {
        let n = 24;
        let grid = CollocationGrid::new(n);
        for k in [1u32, 2] {
            let row = height_row(&grid, k);
            let values = pseudo_random(n, 0.4);
            let profile =
                WaveProfile::from_values(DispersionModel::Whitham, k, 0.8, &values).unwrap();
            let via_row = row.dot(&DVector::from_column_slice(&values));
            assert_abs_diff_eq!(via_row, waveheight(&profile), epsilon = 1e-12);
        }
    }

    #[test]
    fn line_search_still_converges() {
        let n = 32;
        let grid = CollocationGrid::new(n);
        let opts = NewtonOptions {
            line_search: true,
            ..NewtonOptions::default()
        };
        let (guess, mu) = asymptotics::whitham_expansion(0.03, grid.points());
        let (_, report) =
            newton_fixed_speed(&guess, mu, DispersionModel::Whitham, 1, &opts).unwrap();
        assert!(report.converged);
    }
}
