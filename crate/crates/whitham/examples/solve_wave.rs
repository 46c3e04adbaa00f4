//! Solve one steady Whitham wave at a fixed speed and print its profile.
//!
//! Reproduces the classic N = 16 wave at μ = 0.789: waveheight ≈ 0.3368.

use whitham::continuation::{trace_branch, ContinuationConfig};
use whitham::spectral::DispersionModel;
use whitham::steady::{newton_fixed_speed, waveheight, NewtonOptions};

fn main() {
    let model = DispersionModel::Whitham;
    let target_mu = 0.789;
    let n = 16;

    // March down the branch until the target speed is bracketed.
    let config = ContinuationConfig {
        n_initial: 32,
        eps0: 0.01,
        height_step: 0.005,
        height_max: 0.6,
        max_n: 128,
        ..ContinuationConfig::default()
    };
    let branch = trace_branch(model, &config).expect("branch start");
    let bracket = branch
        .points
        .windows(2)
        .find(|w| (w[0].mu - target_mu) * (w[1].mu - target_mu) <= 0.0)
        .expect("target speed bracketed");

    // Interpolate a seed and solve at the exact speed on the N-point grid.
    let t = (target_mu - bracket[0].mu) / (bracket[1].mu - bracket[0].mu);
    let va = bracket[0].profile.resampled(n).values();
    let vb = bracket[1].profile.resampled(n).values();
    let seed: Vec<f64> = va.iter().zip(&vb).map(|(a, b)| a + (b - a) * t).collect();
    let (wave, report) =
        newton_fixed_speed(&seed, target_mu, model, 1, &NewtonOptions::default()).unwrap();

    println!(
        "wave at mu = {}: height {:.6}, {} Newton iterations, residual {:.2e}",
        wave.mu(),
        waveheight(&wave),
        report.iterations,
        report.final_residual()
    );
    println!("\n  l   cosine amplitude of cos(l x)");
    for l in 0..n {
        println!("{:3}   {:+.6e}", l, wave.spectrum().mode_amplitude(l));
    }
    println!("\nprofile on [0, 2pi):");
    let plot: Vec<f64> = (0..33).map(|i| 2.0 * std::f64::consts::PI * i as f64 / 32.0).collect();
    for (x, v) in plot.iter().zip(wave.evaluate(&plot)) {
        let bar = ((v + 0.2) * 100.0).max(0.0) as usize;
        println!("x = {x:5.2}  {v:+.4}  {}", "*".repeat(bar.min(60)));
    }
}
