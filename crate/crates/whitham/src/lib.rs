//! Periodic traveling waves of the Whitham equation.
//!
//! Computes, continues and validates 2π-periodic traveling-wave solutions of
//! the normalized Whitham equation `−μφ + φ² + K∗φ = 0`, where `K` carries
//! the full water-wave dispersion `sqrt(tanh(ξ)/ξ)` as a Fourier multiplier.
//! A nonlocal formulation of the KdV equation rides along on the same
//! machinery for comparison.
//!
//! The pieces, bottom to top:
//!
//! * [`spectral`] — cosine collocation basis on the midpoint grid, dispersion
//!   symbols, and the dense discrete operator `[K]`.
//! * [`steady`] — collocation residual and Jacobian, Newton solves at fixed
//!   speed or fixed waveheight, Galilean shifts.
//! * [`asymptotics`] — closed-form bifurcation constants and the
//!   small-amplitude expansions used as initial guesses and oracles.
//! * [`continuation`] — branch tracing from the bifurcation point through the
//!   turning point, with waveheight reparametrization and grid refinement.
//! * [`evolution`] — pseudo-spectral Fourier discretization of the
//!   time-dependent equation and the implicit midpoint stepper used to
//!   certify steady waves by propagation.
//! * [`branch_io`] — JSON profile records, branch CSV export and the aligned
//!   shape comparison.
//! * [`cli`] — the `whitham` binary: `solve`, `branch`, `evolve`, `validate`,
//!   `compare-kdv` and `asymptotics` subcommands.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run -p whitham --example solve_wave          # one traveling wave
//! cargo run -p whitham --example trace_branch       # full bifurcation branch
//! cargo run -p whitham --example validate_evolution # propagate & measure error
//! cargo run -p whitham --example compare_kdv        # Whitham vs KdV shapes
//! cargo run -p whitham --example asymptotic_check   # expansion vs Newton
//! cargo run -p whitham --example evolve_snapshots   # time-dependent run
//! ```

pub mod asymptotics;
pub mod branch_io;
pub mod cli;
pub mod continuation;
pub mod evolution;
pub mod spectral;
pub mod steady;

pub use spectral::{
    apply_multiplier, cosine_analysis, cosine_synthesis, operator_matrix, CollocationGrid,
    CosineSpectrum, DispersionModel,
};
pub use steady::{
    galilean_shift, jacobian, newton_fixed_height, newton_fixed_speed, residual, waveheight,
    NewtonOptions, SolverReport, WaveProfile,
};
