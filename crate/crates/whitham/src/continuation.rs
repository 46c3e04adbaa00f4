//! Branch continuation from the small-amplitude regime through the turning
//! point.
//!
//! The trace starts from the asymptotic guess near the bifurcation speed
//! `μ_k`, marches the nondimensional speed downward (the Whitham branches
//! are subcritical), and switches to a waveheight parametrization once the
//! secant slope `|Δμ/Δh|` drops below a threshold — height stays a good
//! parameter through the fold where μ turns around.  New points are seeded
//! by linear extrapolation of the previous two.  When Newton struggles or a
//! step fails outright the grid is doubled once and the step retried; a
//! second failure ends the branch.

use thiserror::Error;

use crate::asymptotics;
use crate::spectral::{CollocationGrid, DispersionModel};
use crate::steady::{
    newton_fixed_height, newton_fixed_speed, waveheight, NewtonOptions, SolveError, SolverReport,
    WaveProfile,
};

#[derive(Debug, Error)]
pub enum ContinuationError {
    /// The very first Newton solve did not produce a nontrivial wave.
    #[error("branch start failed: {0}")]
    BranchStart(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Which parameter the corrector held fixed for a branch point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamMode {
    Speed,
    Height,
}

/// One converged point on a bifurcation branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub mu: f64,
    pub height: f64,
    pub profile: WaveProfile,
    pub param_mode: ParamMode,
    pub report: SolverReport,
}

/// Why a trace stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached the configured height ceiling.
    HeightLimit,
    /// A step failed even after one grid refinement retry.
    RefinementFailure,
    /// A step failed and the grid could not be refined further.
    StepFailure,
    /// Point budget exhausted.
    MaxPoints,
}

/// An ordered branch of waves with a common fundamental wavenumber.
#[derive(Debug, Clone)]
pub struct Branch {
    pub k: u32,
    pub points: Vec<BranchPoint>,
    /// Index of the point where μ attains its minimum, set at the first
    /// sign change of Δμ along the branch.
    pub turning_point_index: Option<usize>,
    pub termination: Termination,
}

impl Branch {
    pub fn last(&self) -> &BranchPoint {
        self.points.last().expect("a branch is never empty")
    }

    /// `(mu, height)` pairs in branch order.
    pub fn path(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.mu, p.height)).collect()
    }
}

/// Continuation controls.  All steps are positive; `switch_threshold` is the
/// secant slope `|Δμ/Δh|` below which the trace moves to the waveheight
/// parametrization.
#[derive(Debug, Clone)]
pub struct ContinuationConfig {
    pub k: u32,
    pub n_initial: usize,
    /// Amplitude of the first asymptotic guess.
    pub eps0: f64,
    pub mu_step: f64,
    pub height_step: f64,
    pub height_max: f64,
    pub switch_threshold: f64,
    pub newton: NewtonOptions,
    /// Grid multiplier used by [`verify_branch_point`].
    pub refine_factor: usize,
    pub max_points: usize,
    /// Ceiling for grid doubling; a failing step at this size ends the trace.
    pub max_n: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            k: 1,
            n_initial: 64,
            eps0: 0.02,
            mu_step: 2e-3,
            height_step: 0.01,
            height_max: 0.6,
            switch_threshold: 0.5,
            newton: NewtonOptions::default(),
            refine_factor: 2,
            max_points: 400,
            max_n: 1024,
        }
    }
}

/// Speed at which the `k`-th branch bifurcates from the trivial solution,
/// together with a flag marking whether that speed is physical (positive).
///
/// Whitham: `μ_k = sqrt(tanh(k)/k)`.  Nonlocal KdV: `μ = 1 − k²/6`, which is
/// nonpositive for `k >= 3`.
pub fn bifurcation_speed(model: DispersionModel, k: u32) -> (f64, bool) {
    let mu = match model {
        DispersionModel::Whitham => model
            .symbol(k as f64, None)
            .expect("Whitham symbol is total"),
        DispersionModel::KdvNonlocal => 1.0 - (k * k) as f64 / 6.0,
    };
    (mu, mu > 0.0)
}

/// Small-amplitude initial guess on the given grid: collocation values and
/// the speed to start from.
///
/// For `k = 1` both models use their quadratic expansions.  For `k >= 2`
/// only the linear mode `ε cos(kx)` is used, with the speed nudged below
/// `μ_k` in the subcritical direction.
pub fn small_amplitude_guess(
    model: DispersionModel,
    k: u32,
    eps: f64,
    grid: &CollocationGrid,
) -> (Vec<f64>, f64) {
    assert!(k >= 1);
    if k == 1 {
        let coeffs = match model {
            DispersionModel::Whitham => asymptotics::whitham_coefficients(),
            DispersionModel::KdvNonlocal => asymptotics::kdv_coefficients(),
        };
        (coeffs.profile_at(eps, grid.points()), coeffs.speed_at(eps))
    } else {
        let (mu_k, _) = bifurcation_speed(model, k);
        let values = grid
            .points()
            .iter()
            .map(|&x| eps * (k as f64 * x).cos())
            .collect();
        (values, mu_k - eps * eps)
    }
}

/// Linear extrapolation of two value vectors; falls back to the newer one
/// when the parameter gap degenerates.
fn extrapolate(prev: &[f64], last: &[f64], p_prev: f64, p_last: f64, p_target: f64) -> Vec<f64> {
    let gap = p_last - p_prev;
    if gap.abs() < 1e-14 || prev.len() != last.len() {
        return last.to_vec();
    }
    let t = (p_target - p_last) / gap;
    last.iter()
        .zip(prev)
        .map(|(&a, &b)| a + (a - b) * t)
        .collect()
}

struct StepAttempt {
    profile: WaveProfile,
    report: SolverReport,
    mode: ParamMode,
}

/// Trace a branch from the small-amplitude regime until a configured limit
/// or an unrecoverable step failure.
pub fn trace_branch(
    model: DispersionModel,
    config: &ContinuationConfig,
) -> Result<Branch, ContinuationError> {
    assert!(config.k >= 1);
    assert!(
        config.eps0 > 0.0
            && config.mu_step > 0.0
            && config.height_step > 0.0
            && config.height_max > 0.0,
        "continuation steps must be positive"
    );
    assert!(config.n_initial >= 2 && config.refine_factor >= 2);
    let k = config.k;
    let mut n = config.n_initial;
    let grid = CollocationGrid::new(n);
    let (guess, mu0) = small_amplitude_guess(model, k, config.eps0, &grid);

    let (profile, report) = newton_fixed_speed(&guess, mu0, model, k, &config.newton)
        .map_err(|e| ContinuationError::BranchStart(e.to_string()))?;
    if !report.converged {
        return Err(ContinuationError::BranchStart(format!(
            "newton did not converge at mu = {mu0} (residual {:.3e})",
            report.final_residual()
        )));
    }
    let h0 = waveheight(&profile);
    if h0 < 0.5 * config.eps0 {
        return Err(ContinuationError::BranchStart(format!(
            "first solve collapsed to the trivial solution (height {h0:.3e})"
        )));
    }

    let mut points = vec![BranchPoint {
        mu: mu0,
        height: h0,
        profile,
        param_mode: ParamMode::Speed,
        report,
    }];
    let mut mode = ParamMode::Speed;
    let mut turning: Option<usize> = None;

    let termination = 'trace: loop {
        if points.len() >= config.max_points {
            break Termination::MaxPoints;
        }
        let last = points.last().expect("nonempty");
        if last.height >= config.height_max {
            break Termination::HeightLimit;
        }

        // One-way switch to the height parametrization once the branch runs
        // flat in mu.
        if mode == ParamMode::Speed && points.len() >= 2 {
            let prev = &points[points.len() - 2];
            let dh = last.height - prev.height;
            let slope = if dh.abs() < 1e-14 {
                f64::INFINITY
            } else {
                ((last.mu - prev.mu) / dh).abs()
            };
            if slope < config.switch_threshold {
                mode = ParamMode::Height;
            }
        }

        // Produce a verified point for this step, doubling the grid on
        // Newton failure, labored convergence or failed verification.  The
        // under-resolved regime near the branch end converges happily to
        // spurious waves, so acceptance hinges on the refit at a finer grid
        // reproducing speed and height.
        let attempt = loop {
            let candidate = match mode {
                ParamMode::Speed => match try_speed_step(model, config, &points, n) {
                    Some(c) => Some(c),
                    None => {
                        // A failed fixed-speed solve also flips the
                        // parametrization.
                        mode = ParamMode::Height;
                        continue;
                    }
                },
                ParamMode::Height => try_height_step(model, config, &points, n),
            };
            let refinable = 2 * n <= config.max_n;
            match candidate {
                Some(c) => {
                    let labored = c.report.iterations > 2 * config.newton.max_iter / 3;
                    let verified = verify_point_with(
                        &c.profile,
                        config.refine_factor,
                        &config.newton,
                    );
                    if verified && !labored {
                        break c;
                    }
                    if verified && labored {
                        // Accept, but grow the grid for subsequent steps.
                        if refinable {
                            n *= 2;
                        }
                        break c;
                    }
                    if !refinable {
                        break 'trace Termination::RefinementFailure;
                    }
                    n *= 2;
                }
                None => {
                    if !refinable {
                        break 'trace Termination::StepFailure;
                    }
                    n *= 2;
                }
            }
        };

        let new_mu = attempt.profile.mu();
        let new_h = waveheight(&attempt.profile);
        let idx = points.len();
        if turning.is_none() && idx >= 2 {
            let dmu_prev = points[idx - 1].mu - points[idx - 2].mu;
            let dmu = new_mu - points[idx - 1].mu;
            if dmu_prev < 0.0 && dmu > 0.0 {
                turning = Some(idx - 1);
            }
        }
        points.push(BranchPoint {
            mu: new_mu,
            height: new_h,
            profile: attempt.profile,
            param_mode: attempt.mode,
            report: attempt.report,
        });
    };

    Ok(Branch {
        k,
        points,
        turning_point_index: turning,
        termination,
    })
}

/// Trace-time verification: refit the wave at fixed height on a grid
/// `refine_factor` times finer and require speed and height to agree.
fn verify_point_with(profile: &WaveProfile, refine_factor: usize, opts: &NewtonOptions) -> bool {
    let fine = profile.resampled(profile.n_points() * refine_factor);
    match newton_fixed_height(
        &fine.values(),
        profile.mu(),
        waveheight(&fine),
        profile.model(),
        profile.fundamental(),
        opts,
    ) {
        Ok((refit, report)) => {
            report.converged
                && (refit.mu() - profile.mu()).abs() <= 1e-6
                && (waveheight(&refit) - waveheight(profile)).abs() <= 1e-6
        }
        Err(_) => false,
    }
}

fn try_speed_step(
    model: DispersionModel,
    config: &ContinuationConfig,
    points: &[BranchPoint],
    n: usize,
) -> Option<StepAttempt> {
    let last = points.last()?;
    let target_mu = last.mu - config.mu_step;
    if target_mu <= 0.0 {
        return None;
    }
    let last_values = last.profile.resampled(n).values();
    let seed = if points.len() >= 2 {
        let prev = &points[points.len() - 2];
        extrapolate(
            &prev.profile.resampled(n).values(),
            &last_values,
            prev.mu,
            last.mu,
            target_mu,
        )
    } else {
        last_values
    };
    let (profile, report) =
        newton_fixed_speed(&seed, target_mu, model, config.k, &config.newton).ok()?;
    let h = waveheight(&profile);
    // Reject collapses to the trivial branch and any height reversal; the
    // height must grow strictly along the branch.
    if !report.converged || h <= last.height {
        return None;
    }
    Some(StepAttempt {
        profile,
        report,
        mode: ParamMode::Speed,
    })
}

fn try_height_step(
    model: DispersionModel,
    config: &ContinuationConfig,
    points: &[BranchPoint],
    n: usize,
) -> Option<StepAttempt> {
    let last = points.last()?;
    let target_h = last.height + config.height_step;
    let last_values = last.profile.resampled(n).values();
    let (seed, seed_mu) = if points.len() >= 2 {
        let prev = &points[points.len() - 2];
        let values = extrapolate(
            &prev.profile.resampled(n).values(),
            &last_values,
            prev.height,
            last.height,
            target_h,
        );
        let dh = last.height - prev.height;
        let mu = if dh.abs() < 1e-14 {
            last.mu
        } else {
            last.mu + (last.mu - prev.mu) * (target_h - last.height) / dh
        };
        (values, mu)
    } else {
        (last_values, last.mu)
    };
    let (profile, report) =
        newton_fixed_height(&seed, seed_mu, target_h, model, config.k, &config.newton).ok()?;
    if !report.converged || profile.mu() <= 0.0 || waveheight(&profile) <= last.height {
        return None;
    }
    Some(StepAttempt {
        profile,
        report,
        mode: ParamMode::Height,
    })
}

/// Re-solve a branch point on a grid `refine_factor` times finer, seeded by
/// interpolation, and check that speed and height survive.  Failure of this
/// check flags an unresolved or spurious point.
pub fn verify_branch_point(point: &BranchPoint, refine_factor: usize) -> bool {
    assert!(refine_factor >= 2);
    // The refit holds the interpolated wave's own height fixed; for a genuine
    // point it coincides with the stored one, while a corrupted spectrum
    // drags the refit away from the recorded (mu, height) pair.
    verify_point_with(&point.profile, refine_factor, &NewtonOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const MU1: f64 = 0.872_693_620_897_829_6;

    #[test]
    fn bifurcation_speeds() {
        let (mu, ok) = bifurcation_speed(DispersionModel::Whitham, 1);
        assert_abs_diff_eq!(mu, MU1, epsilon = 1e-15);
        assert!(ok);
        let (mu2, _) = bifurcation_speed(DispersionModel::Whitham, 2);
        assert_abs_diff_eq!(mu2, (2.0_f64.tanh() / 2.0).sqrt(), epsilon = 1e-15);
        assert!((mu2 - 0.6943).abs() < 1e-4);

        let (kdv1, ok1) = bifurcation_speed(DispersionModel::KdvNonlocal, 1);
        assert_eq!(kdv1, 5.0 / 6.0);
        assert!(ok1);
        let (kdv3, ok3) = bifurcation_speed(DispersionModel::KdvNonlocal, 3);
        assert!(kdv3 <= 0.0);
        assert!(!ok3);
    }

    #[test]
    fn guess_at_zero_amplitude_sits_on_trivial_branch() {
        let grid = CollocationGrid::new(16);
        let (values, mu) = small_amplitude_guess(DispersionModel::Whitham, 1, 0.0, &grid);
        assert!(values.iter().all(|&v| v == 0.0));
        assert_abs_diff_eq!(mu, MU1, epsilon = 1e-15);
    }

    #[test]
    fn kdv_guess_matches_expansion() {
        let grid = CollocationGrid::new(8);
        let eps = 0.01;
        let (values, _) = small_amplitude_guess(DispersionModel::KdvNonlocal, 1, eps, &grid);
        for (&x, &v) in grid.points().iter().zip(&values) {
            let expected = eps * x.cos() + eps * eps * ((2.0 * x).cos() - 3.0);
            assert_abs_diff_eq!(v, expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn higher_k_guess_uses_linear_mode() {
        let grid = CollocationGrid::new(16);
        let (values, mu) = small_amplitude_guess(DispersionModel::Whitham, 2, 0.01, &grid);
        let (mu2, _) = bifurcation_speed(DispersionModel::Whitham, 2);
        assert!(mu < mu2);
        for (&x, &v) in grid.points().iter().zip(&values) {
            assert_abs_diff_eq!(v, 0.01 * (2.0 * x).cos(), epsilon = 1e-15);
        }
    }

    #[test]
    fn small_branch_follows_asymptotic_speed() {
        let config = ContinuationConfig {
            n_initial: 16,
            eps0: 0.005,
            height_step: 0.01,
            height_max: 0.05,
            ..ContinuationConfig::default()
        };
        let branch = trace_branch(DispersionModel::Whitham, &config).unwrap();
        assert!(branch.points.len() >= 3);
        assert_eq!(branch.termination, Termination::HeightLimit);
        let coeffs = asymptotics::whitham_coefficients();
        for p in &branch.points {
            let eps = p.height / 2.0;
            assert!(
                (p.mu - coeffs.speed_at(eps)).abs() <= 1e-3,
                "mu {} vs asymptotic {} at height {}",
                p.mu,
                coeffs.speed_at(eps),
                p.height
            );
            assert!(p.mu < MU1 && p.mu > 0.0 && p.mu < 1.0);
        }
        // Heights strictly increase.
        for w in branch.points.windows(2) {
            assert!(w[1].height > w[0].height);
        }
    }

    #[test]
    fn height_max_below_first_step_yields_one_point_branch() {
        let config = ContinuationConfig {
            n_initial: 16,
            eps0: 0.02,
            height_max: 0.01,
            ..ContinuationConfig::default()
        };
        let branch = trace_branch(DispersionModel::Whitham, &config).unwrap();
        assert_eq!(branch.points.len(), 1);
        assert_eq!(branch.termination, Termination::HeightLimit);
    }

    #[test]
    fn verify_accepts_resolved_point_and_rejects_corruption() {
        let config = ContinuationConfig {
            n_initial: 16,
            eps0: 0.01,
            height_max: 0.05,
            ..ContinuationConfig::default()
        };
        let branch = trace_branch(DispersionModel::Whitham, &config).unwrap();
        let point = branch.last();
        assert!(verify_branch_point(point, 2));

        let mut corrupted = point.clone();
        let mut coeffs = corrupted.profile.spectrum().coeffs().to_vec();
        coeffs[1] += 0.1;
        corrupted.profile = WaveProfile::new(
            corrupted.profile.model(),
            corrupted.profile.fundamental(),
            corrupted.mu,
            crate::spectral::CosineSpectrum::new(coeffs),
        );
        assert!(!verify_branch_point(&corrupted, 2));
    }
}
