//! Command-line front end: deterministic wiring from flags to the solver,
//! continuation, evolution and comparison pipelines.
//!
//! Every subcommand prints a single JSON summary line on stdout and writes
//! requested artifacts to the paths given by `--out`; failures print a JSON
//! error object on stderr and exit nonzero.  Identical flags produce
//! byte-identical outputs — there is no randomness and no timestamping
//! anywhere.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::asymptotics;
use crate::branch_io::{
    align_for_comparison, export_branch_csv, export_comparison_csv, export_snapshots_csv,
    half_height_width, load_profile, save_branch_record, save_profile, BranchRecord,
    ProfileRecord,
};
use crate::continuation::{bifurcation_speed, trace_branch, Branch, ContinuationConfig};
use crate::evolution::{evolve, project_profile, traveling_wave_metrics, EvolutionConfig};
use crate::spectral::DispersionModel;
use crate::steady::{
    newton_fixed_height, newton_fixed_speed, waveheight, NewtonOptions, SolverReport, WaveProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Whitham,
    Kdv,
}

impl From<ModelArg> for DispersionModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Whitham => DispersionModel::Whitham,
            ModelArg::Kdv => DispersionModel::KdvNonlocal,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "whitham",
    about = "Periodic traveling waves of the Whitham equation: solve, continue, propagate, compare"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one traveling wave at a target speed or waveheight.
    Solve(SolveArgs),
    /// Trace a bifurcation branch and export it as CSV.
    Branch(BranchArgs),
    /// Propagate a stored profile with the pseudo-spectral integrator.
    Evolve(EvolveArgs),
    /// Certify a stored profile by propagation and report error metrics.
    Validate(ValidateArgs),
    /// Solve Whitham and KdV waves of equal height and compare their shapes.
    CompareKdv(CompareKdvArgs),
    /// Print bifurcation constants and small-amplitude expansion samples.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Debug, Args)]
struct NewtonArgs {
    /// Sup-norm Newton tolerance.
    #[arg(long, default_value_t = 1e-12)]
    newton_tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Fall back to a halving line search when a full Newton step grows the
    /// residual.
    #[arg(long, default_value_t = false)]
    line_search: bool,
}

impl NewtonArgs {
    fn options(&self) -> Result<NewtonOptions> {
        if self.newton_tol <= 0.0 {
            bail!("--newton-tol must be positive");
        }
        if self.max_iter == 0 {
            bail!("--max-iter must be at least 1");
        }
        Ok(NewtonOptions {
            tol: self.newton_tol,
            max_iter: self.max_iter,
            line_search: self.line_search,
        })
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Whitham)]
    model: ModelArg,
    /// Fundamental wavenumber (branch index).
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Collocation points of the reported solution.
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Target nondimensional wave speed (exclusive with --height).
    #[arg(long, conflicts_with = "height")]
    mu: Option<f64>,
    /// Target waveheight (exclusive with --mu).
    #[arg(long)]
    height: Option<f64>,
    /// Amplitude of the starting asymptotic guess.
    #[arg(long, default_value_t = 0.01)]
    eps0: f64,
    /// Height increment of the bracketing march.
    #[arg(long, default_value_t = 0.005)]
    height_step: f64,
    /// Height ceiling of the bracketing march for --mu targets.
    #[arg(long, default_value_t = 0.6)]
    height_max: f64,
    #[command(flatten)]
    newton: NewtonArgs,
    /// Write the solved profile as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BranchArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Whitham)]
    model: ModelArg,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Initial grid size; the trace doubles it as the waves steepen.
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 0.02)]
    eps0: f64,
    #[arg(long, default_value_t = 2e-3)]
    mu_step: f64,
    #[arg(long, default_value_t = 0.01)]
    height_step: f64,
    #[arg(long, default_value_t = 0.6)]
    height_max: f64,
    /// Secant slope |dmu/dh| below which the trace switches to the height
    /// parametrization.
    #[arg(long, default_value_t = 0.5)]
    switch_threshold: f64,
    #[arg(long, default_value_t = 1024)]
    max_n: usize,
    #[arg(long, default_value_t = 400)]
    max_points: usize,
    #[command(flatten)]
    newton: NewtonArgs,
    /// Branch CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON sidecar with the full branch record.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Embed every profile in the sidecar.
    #[arg(long, default_value_t = false)]
    with_profiles: bool,
}

#[derive(Debug, Args)]
struct EvolutionArgs {
    /// Time step of the trapezoidal integrator.
    #[arg(long, default_value_t = 2.0_f64.powi(-10))]
    dt: f64,
    /// Fourier modes of the evolution grid.
    #[arg(long, default_value_t = 32)]
    n_evolution: usize,
    #[arg(long, default_value_t = 1e-12)]
    fixed_point_tol: f64,
    #[arg(long, default_value_t = 10)]
    max_inner_iters: usize,
}

impl EvolutionArgs {
    fn config(&self) -> Result<EvolutionConfig> {
        if self.dt <= 0.0 {
            bail!("--dt must be positive");
        }
        if self.fixed_point_tol <= 0.0 {
            bail!("--fixed-point-tol must be positive");
        }
        Ok(EvolutionConfig {
            dt: self.dt,
            fixed_point_tol: self.fixed_point_tol,
            max_inner_iters: self.max_inner_iters,
        })
    }
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Stored profile to propagate.
    #[arg(long)]
    input: PathBuf,
    /// Number of wave periods 2π/μ to integrate.
    #[arg(long, default_value_t = 1.0)]
    periods: f64,
    #[command(flatten)]
    evolution: EvolutionArgs,
    /// Record a snapshot every this many time units.
    #[arg(long)]
    snapshot_every: Option<f64>,
    /// Snapshot CSV path (columns t,x,eta).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    periods: f64,
    #[command(flatten)]
    evolution: EvolutionArgs,
}

#[derive(Debug, Args)]
struct CompareKdvArgs {
    /// Common waveheight of the two waves.
    #[arg(long)]
    height: f64,
    /// Collocation points of each steady solve.
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Evaluation points of the comparison grid on [0, 2π).
    #[arg(long, default_value_t = 512)]
    grid_points: usize,
    #[arg(long, default_value_t = 0.01)]
    eps0: f64,
    #[arg(long, default_value_t = 0.005)]
    height_step: f64,
    #[command(flatten)]
    newton: NewtonArgs,
    /// Paired CSV path (columns x,whitham,kdv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AsymptoticsArgs {
    /// Amplitudes at which to sample the expansions.
    #[arg(long, num_args = 1.., default_values_t = [0.01, 0.02, 0.04])]
    eps: Vec<f64>,
}

/// Parse `std::env::args` and run; returns the process exit code.
pub fn run() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run_cli(cli),
        Err(e) => {
            // clap handles --help/--version printing itself.
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}

fn run_cli(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Branch(args) => cmd_branch(args),
        Command::Evolve(args) => cmd_evolve(args),
        Command::Validate(args) => cmd_validate(args),
        Command::CompareKdv(args) => cmd_compare_kdv(args),
        Command::Asymptotics(args) => cmd_asymptotics(args),
    };
    match result {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": format!("{e:#}") }));
            1
        }
    }
}

/// What a bracketing solve is aiming for.
enum SolveTarget {
    Mu(f64),
    Height(f64),
}

/// Stepping controls of the bracketing march.
struct MarchParams {
    eps0: f64,
    height_step: f64,
    height_max: f64,
}

/// March along the branch from small amplitude until the target is
/// bracketed, then solve at the target exactly on an `n`-point grid.
///
/// A `Mu` target above the first branch point is answered by the trivial
/// solution (the zero wave is locally the only solution up there); the
/// second return flag reports that case.
fn solve_at_target(
    model: DispersionModel,
    k: u32,
    n: usize,
    target: SolveTarget,
    march: &MarchParams,
    newton: &NewtonOptions,
) -> Result<(WaveProfile, SolverReport, bool)> {
    let (mu_k, physical) = bifurcation_speed(model, k);
    if !physical {
        bail!("branch k = {k} of model {model:?} bifurcates at nonpositive speed {mu_k}");
    }

    if let SolveTarget::Mu(mu) = target {
        if mu <= 0.0 {
            bail!("target speed must be positive");
        }
        if mu >= mu_k {
            // Only the trivial solution exists at and above the bifurcation
            // point (away from mu = 1).
            let (profile, report) =
                newton_fixed_speed(&vec![0.0; n], mu, model, k, newton)?;
            return Ok((profile, report, true));
        }
    }
    if let SolveTarget::Height(h) = target {
        if h <= 0.0 {
            bail!("target height must be positive");
        }
    }

    // Keep the starting guess below the target so the march brackets it.
    let mut eps = march.eps0;
    if let SolveTarget::Mu(mu) = target {
        let gap = mu_k - mu;
        let scale = (gap / 10.0).sqrt();
        eps = eps.min(scale.max(1e-6));
    }
    if let SolveTarget::Height(h) = target {
        eps = eps.min((h / 4.0).max(1e-6));
    }

    let trace_cfg = ContinuationConfig {
        k,
        n_initial: n,
        eps0: eps,
        height_step: march.height_step,
        height_max: match target {
            SolveTarget::Height(h) => h,
            SolveTarget::Mu(_) => march.height_max,
        },
        max_n: (8 * n).max(512),
        newton: *newton,
        ..ContinuationConfig::default()
    };
    let branch = trace_branch(model, &trace_cfg)
        .with_context(|| format!("continuation failed for model {model:?}"))?;

    let (seed, mu_seed, target_h) = bracket_seed(&branch, &target, n)
        .ok_or_else(|| {
            anyhow!(
                "branch of model {model:?} ended at height {:.4} (termination {:?}) before reaching the target",
                branch.last().height,
                branch.termination
            )
        })?;

    let (profile, report) = match target {
        SolveTarget::Mu(mu) => newton_fixed_speed(&seed, mu, model, k, newton)?,
        SolveTarget::Height(_) => {
            newton_fixed_height(&seed, mu_seed, target_h, model, k, newton)?
        }
    };
    if !report.converged {
        bail!(
            "final solve at the target did not converge on the {n}-point grid (residual {:.3e})",
            report.final_residual()
        );
    }
    Ok((profile, report, false))
}

/// Locate the target between consecutive branch points and build an
/// interpolated seed on the `n`-point grid.
fn bracket_seed(
    branch: &Branch,
    target: &SolveTarget,
    n: usize,
) -> Option<(Vec<f64>, f64, f64)> {
    let first = branch.points.first()?;
    let key = |p: &crate::continuation::BranchPoint| match target {
        SolveTarget::Mu(_) => p.mu,
        SolveTarget::Height(_) => p.height,
    };
    let goal = match target {
        SolveTarget::Mu(m) => *m,
        SolveTarget::Height(h) => *h,
    };
    // Target on the near side of the first point: seed from it directly.
    let first_key = key(first);
    let below_first = match target {
        SolveTarget::Mu(_) => goal >= first_key,
        SolveTarget::Height(_) => goal <= first_key,
    };
    if below_first {
        return Some((
            first.profile.resampled(n).values(),
            first.mu,
            goal,
        ));
    }
    for w in branch.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if (key(a) - goal) * (key(b) - goal) <= 0.0 {
            let t = if (key(b) - key(a)).abs() < 1e-14 {
                0.0
            } else {
                (goal - key(a)) / (key(b) - key(a))
            };
            let va = a.profile.resampled(n).values();
            let vb = b.profile.resampled(n).values();
            let seed: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| x + (y - x) * t).collect();
            let mu = a.mu + (b.mu - a.mu) * t;
            return Some((seed, mu, goal));
        }
    }
    None
}

fn profile_summary(profile: &WaveProfile, report: &SolverReport, trivial: bool) -> serde_json::Value {
    json!({
        "model": profile.model(),
        "k": profile.fundamental(),
        "n": profile.n_points(),
        "mu": profile.mu(),
        "height": waveheight(profile),
        "iterations": report.iterations,
        "residual_norm": report.final_residual(),
        "trivial": trivial,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<serde_json::Value> {
    if args.k < 1 {
        bail!("--k must be at least 1");
    }
    if args.n < 2 {
        bail!("--n must be at least 2");
    }
    let newton = args.newton.options()?;
    let target = match (args.mu, args.height) {
        (Some(mu), None) => SolveTarget::Mu(mu),
        (None, Some(h)) => SolveTarget::Height(h),
        _ => bail!("exactly one of --mu or --height is required"),
    };
    let model = args.model.into();
    let (profile, report, trivial) = solve_at_target(
        model,
        args.k,
        args.n,
        target,
        &MarchParams {
            eps0: args.eps0,
            height_step: args.height_step,
            height_max: args.height_max,
        },
        &newton,
    )?;
    let mut summary = profile_summary(&profile, &report, trivial);
    if let Some(path) = args.out {
        let record = ProfileRecord::from_solution(&profile, &report, newton.tol);
        save_profile(&record, &path)?;
        summary["out"] = json!(path);
    }
    Ok(summary)
}

fn cmd_branch(args: BranchArgs) -> Result<serde_json::Value> {
    if args.k < 1 {
        bail!("--k must be at least 1");
    }
    if args.n < 2 {
        bail!("--n must be at least 2");
    }
    for (name, value) in [
        ("--eps0", args.eps0),
        ("--mu-step", args.mu_step),
        ("--height-step", args.height_step),
        ("--height-max", args.height_max),
        ("--switch-threshold", args.switch_threshold),
    ] {
        if value <= 0.0 {
            bail!("{name} must be positive");
        }
    }
    if args.max_n < args.n {
        bail!("--max-n must be at least --n");
    }
    let model: DispersionModel = args.model.into();
    let config = ContinuationConfig {
        k: args.k,
        n_initial: args.n,
        eps0: args.eps0,
        mu_step: args.mu_step,
        height_step: args.height_step,
        height_max: args.height_max,
        switch_threshold: args.switch_threshold,
        newton: args.newton.options()?,
        refine_factor: 2,
        max_points: args.max_points,
        max_n: args.max_n,
    };
    let branch = trace_branch(model, &config)?;
    export_branch_csv(&branch, &args.out)?;
    if let Some(sidecar) = &args.sidecar {
        let record = BranchRecord::from_branch(&branch, model, args.with_profiles);
        save_branch_record(&record, sidecar)?;
    }
    Ok(json!({
        "model": model,
        "k": branch.k,
        "points": branch.points.len(),
        "termination": branch.termination,
        "turning_point_index": branch.turning_point_index,
        "final_height": branch.last().height,
        "final_mu": branch.last().mu,
        "out": args.out,
        "sidecar": args.sidecar,
    }))
}

fn cmd_evolve(args: EvolveArgs) -> Result<serde_json::Value> {
    let config = args.evolution.config()?;
    if args.periods < 0.0 {
        bail!("--periods must be nonnegative");
    }
    let record = load_profile(&args.input)
        .with_context(|| format!("loading profile {}", args.input.display()))?;
    let profile = record.to_profile();
    let initial = project_profile(&profile, args.evolution.n_evolution, 0.0)?;
    let t_final = args.periods * 2.0 * std::f64::consts::PI / profile.mu();
    let run = evolve(&initial, t_final, &config, args.snapshot_every)?;

    if let Some(path) = &args.out {
        if run.snapshots.is_empty() {
            let endpoints = [initial.clone(), run.state.clone()];
            export_snapshots_csv(&endpoints, path)?;
        } else {
            export_snapshots_csv(&run.snapshots, path)?;
        }
    }
    Ok(json!({
        "input": args.input,
        "t_final": run.state.time(),
        "steps": run.steps,
        "max_inner_iters": run.max_inner_iters,
        "snapshots": run.snapshots.len(),
        "out": args.out,
    }))
}

fn cmd_validate(args: ValidateArgs) -> Result<serde_json::Value> {
    let config = args.evolution.config()?;
    if args.periods < 0.0 {
        bail!("--periods must be nonnegative");
    }
    let record = load_profile(&args.input)
        .with_context(|| format!("loading profile {}", args.input.display()))?;
    let profile = record.to_profile();
    let metrics =
        traveling_wave_metrics(&profile, args.periods, args.evolution.n_evolution, &config)?;
    Ok(json!({
        "input": args.input,
        "periods": args.periods,
        "n_evolution": args.evolution.n_evolution,
        "dt": config.dt,
        "l2_error": metrics.l2_error,
        "height_error": metrics.height_error,
        "phase_shift": metrics.phase_shift,
        "inner_iters_max": metrics.inner_iters_max,
    }))
}

fn cmd_compare_kdv(args: CompareKdvArgs) -> Result<serde_json::Value> {
    if args.grid_points < 8 {
        bail!("--grid-points must be at least 8");
    }
    let newton = args.newton.options()?;
    let solve = |model: DispersionModel| -> Result<WaveProfile> {
        let (profile, _, _) = solve_at_target(
            model,
            1,
            args.n,
            SolveTarget::Height(args.height),
            &MarchParams {
                eps0: args.eps0,
                height_step: args.height_step,
                height_max: 0.6,
            },
            &newton,
        )
        .with_context(|| format!("model {model:?} cannot reach height {}", args.height))?;
        Ok(profile)
    };
    let whitham = solve(DispersionModel::Whitham)?;
    let kdv = solve(DispersionModel::KdvNonlocal)?;

    let grid: Vec<f64> = (0..args.grid_points)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / args.grid_points as f64)
        .collect();
    let (aligned_w, aligned_k) = align_for_comparison(&whitham, &kdv, &grid);
    let width_w = half_height_width(&aligned_w, &grid);
    let width_k = half_height_width(&aligned_k, &grid);

    if let Some(path) = &args.out {
        export_comparison_csv(&grid, &aligned_w, &aligned_k, path)?;
    }
    Ok(json!({
        "height": args.height,
        "whitham_mu": whitham.mu(),
        "kdv_mu": kdv.mu(),
        "whitham_half_width": width_w,
        "kdv_half_width": width_k,
        "sup_difference": aligned_w
            .iter()
            .zip(&aligned_k)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max),
        "out": args.out,
    }))
}

fn cmd_asymptotics(args: AsymptoticsArgs) -> Result<serde_json::Value> {
    let whitham = asymptotics::whitham_coefficients();
    let kdv = asymptotics::kdv_coefficients();
    let samples: Vec<serde_json::Value> = args
        .eps
        .iter()
        .map(|&eps| {
            let probe = [0.0, std::f64::consts::PI];
            let (wv, wmu) = asymptotics::whitham_expansion(eps, &probe);
            let kv = asymptotics::kdv_expansion(eps, &probe);
            json!({
                "eps": eps,
                "whitham": { "mu": wmu, "crest": wv[0], "trough": wv[1] },
                "kdv": { "crest": kv[0], "trough": kv[1] },
            })
        })
        .collect();
    Ok(json!({
        "whitham": { "mu_star": whitham.mu_star, "c1": whitham.c1, "c2": whitham.c2 },
        "kdv": { "mu_star": kdv.mu_star, "c1": kdv.c1, "c2": kdv.c2 },
        "samples": samples,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_above_bifurcation_point_reports_trivial() {
        let newton = NewtonOptions::default();
        let (profile, report, trivial) = solve_at_target(
            DispersionModel::Whitham,
            1,
            16,
            SolveTarget::Mu(0.95),
            &MarchParams { eps0: 0.01, height_step: 0.005, height_max: 0.6 },
            &newton,
        )
        .unwrap();
        assert!(trivial);
        assert!(report.converged);
        assert!(waveheight(&profile).abs() < 1e-12);
    }

    #[test]
    fn solve_reference_speed_target() {
        let newton = NewtonOptions::default();
        let (profile, report, trivial) = solve_at_target(
            DispersionModel::Whitham,
            1,
            16,
            SolveTarget::Mu(0.789),
            &MarchParams { eps0: 0.01, height_step: 0.005, height_max: 0.6 },
            &newton,
        )
        .unwrap();
        assert!(!trivial);
        assert!(report.converged);
        assert!((waveheight(&profile) - 0.3368).abs() < 5e-3);
    }

    #[test]
    fn unreachable_height_names_the_model() {
        let newton = NewtonOptions::default();
        let err = solve_at_target(
            DispersionModel::Whitham,
            1,
            16,
            SolveTarget::Height(2.5),
            &MarchParams { eps0: 0.01, height_step: 0.01, height_max: 0.6 },
            &newton,
        )
        .expect_err("height 2.5 is beyond the branch");
        assert!(format!("{err:#}").contains("Whitham"));
    }

    #[test]
    fn unphysical_kdv_branch_is_rejected() {
        let newton = NewtonOptions::default();
        let err = solve_at_target(
            DispersionModel::KdvNonlocal,
            3,
            16,
            SolveTarget::Height(0.05),
            &MarchParams { eps0: 0.01, height_step: 0.005, height_max: 0.6 },
            &newton,
        )
        .expect_err("k = 3 KdV speed is nonpositive");
        assert!(format!("{err}").contains("nonpositive"));
    }
}
