//! Randomized invariants: the transform pair, the diagonal action of the
//! operator, the Galilean symmetry, Jacobian consistency and the evolution
//! state's structural guarantees.

use nalgebra::DVector;
use proptest::prelude::*;

use whitham::evolution::{midpoint_step, EvolutionConfig, EvolutionState};
use whitham::spectral::{
    apply_operator_at_grid, cosine_analysis, cosine_synthesis, operator_matrix, CollocationGrid,
    CosineSpectrum, DispersionModel,
};
use whitham::steady::{galilean_shift, jacobian, residual};

fn values_strategy(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    (2usize..=max_n).prop_flat_map(|n| proptest::collection::vec(-0.5f64..0.5, n))
}

proptest! {
    #[test]
    fn dct_roundtrip_is_identity(values in values_strategy(128)) {
        let spec = cosine_analysis(&values).unwrap();
        let grid = CollocationGrid::new(values.len());
        let back = cosine_synthesis(&spec, grid.points());
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in values.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
        // And coefficients reproduce after a second analysis.
        let spec2 = cosine_analysis(&back).unwrap();
        for (a, b) in spec.coeffs().iter().zip(spec2.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn operator_matrix_agrees_with_transforms(
        values in values_strategy(48),
        kdv in proptest::bool::ANY,
        mu in 0.3f64..1.2,
    ) {
        let (model, mu_opt) = if kdv {
            (DispersionModel::KdvNonlocal, Some(mu))
        } else {
            (DispersionModel::Whitham, None)
        };
        let grid = CollocationGrid::new(values.len());
        let m = operator_matrix(model, &grid, mu_opt).unwrap();
        let by_matrix = &m * DVector::from_column_slice(&values);
        let by_transform = apply_operator_at_grid(&values, model, mu_opt).unwrap();
        for i in 0..values.len() {
            let denom = by_transform[i].abs().max(1.0);
            prop_assert!((by_matrix[i] - by_transform[i]).abs() / denom <= 1e-10);
        }
    }

    #[test]
    fn symbols_decrease_within_unit_interval(k1 in 0u32..255, step in 1u32..64, mu in 0.2f64..1.2) {
        let k2 = k1 + step;
        for (model, mu_opt) in [
            (DispersionModel::Whitham, None),
            (DispersionModel::KdvNonlocal, Some(mu)),
        ] {
            let s1 = model.symbol(k1 as f64, mu_opt).unwrap();
            let s2 = model.symbol(k2 as f64, mu_opt).unwrap();
            prop_assert!(s1 > 0.0 && s1 <= 1.0);
            prop_assert!(s2 < s1);
        }
    }

    #[test]
    fn galilean_identity(values in values_strategy(48), mu in 0.2f64..1.1, gamma in -1.0f64..1.0) {
        let (shifted, mu2, b) = galilean_shift(&values, mu, gamma);
        let r0 = residual(&values, mu, DispersionModel::Whitham).unwrap();
        let r1 = residual(&shifted, mu2, DispersionModel::Whitham).unwrap();
        for (a, c) in r0.iter().zip(&r1) {
            prop_assert!((c - a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences(
        values in proptest::collection::vec(-0.2f64..0.2, 16),
        kdv in proptest::bool::ANY,
    ) {
        let (model, mu) = if kdv {
            (DispersionModel::KdvNonlocal, 0.8)
        } else {
            (DispersionModel::Whitham, 0.85)
        };
        let j = jacobian(&values, mu, model).unwrap();
        let h = 1e-6;
        for col in 0..values.len() {
            let mut vp = values.clone();
            let mut vm = values.clone();
            vp[col] += h;
            vm[col] -= h;
            let rp = residual(&vp, mu, model).unwrap();
            let rm = residual(&vm, mu, model).unwrap();
            for row in 0..values.len() {
                let fd = (rp[row] - rm[row]) / (2.0 * h);
                prop_assert!((j[(row, col)] - fd).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn zero_padding_preserves_the_function(
        values in values_strategy(32),
        factor in 2usize..4,
        x in 0.0f64..std::f64::consts::PI,
    ) {
        let spec = cosine_analysis(&values).unwrap();
        let padded = spec.zero_padded(values.len() * factor);
        let a = cosine_synthesis(&spec, &[x])[0];
        let b = cosine_synthesis(&padded, &[x])[0];
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn band_limited_square_is_alias_free(
        low_modes in proptest::collection::vec(-0.3f64..0.3, 4),
        n_exp in 4usize..6,
    ) {
        // Function with modes below N/2 only; its pointwise square on the
        // N grid must match the 2N-grid oracle on every resolved mode.
        let n = 1usize << n_exp;
        let f = |x: f64| -> f64 {
            low_modes
                .iter()
                .enumerate()
                .map(|(l, &a)| a * (l as f64 * x).cos())
                .sum()
        };
        let coarse = CollocationGrid::new(n);
        let fine = CollocationGrid::new(2 * n);
        let sq_coarse: Vec<f64> = coarse.points().iter().map(|&x| f(x) * f(x)).collect();
        let sq_fine: Vec<f64> = fine.points().iter().map(|&x| f(x) * f(x)).collect();
        let a = cosine_analysis(&sq_coarse).unwrap();
        let b = cosine_analysis(&sq_fine).unwrap();
        for l in 0..n {
            prop_assert!((a.mode_amplitude(l) - b.mode_amplitude(l)).abs() <= 1e-12);
        }
    }

    #[test]
    fn midpoint_step_preserves_state_structure(
        modes in proptest::collection::vec(-0.05f64..0.05, 6),
        dt in 1e-4f64..5e-3,
    ) {
        let n = 32;
        let grid = whitham::evolution::evolution_grid(n);
        let values: Vec<f64> = grid
            .iter()
            .map(|&x| {
                modes
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| a * ((k as f64) * x).cos())
                    .sum()
            })
            .collect();
        let state = EvolutionState::from_grid_values(&values, 0.0).unwrap();
        let config = EvolutionConfig {
            dt,
            ..EvolutionConfig::default()
        };
        let (next, sweeps) = midpoint_step(&state, &config).unwrap();
        prop_assert!(sweeps <= 10);
        prop_assert!(next.conjugate_symmetry_defect() <= 1e-13);
        prop_assert_eq!(next.coeff(-(n as i32) / 2), num_complex::Complex::new(0.0, 0.0));
        prop_assert!((next.coeff(0) - state.coeff(0)).norm() <= 1e-14);
    }

    #[test]
    fn spectrum_mode_amplitudes_match_synthesis(values in values_strategy(32)) {
        // Summing mode amplitudes at x = 0 reproduces the crest value.
        let spec = cosine_analysis(&values).unwrap();
        let total: f64 = (0..spec.n_modes()).map(|l| spec.mode_amplitude(l)).sum();
        let crest = cosine_synthesis(&spec, &[0.0])[0];
        prop_assert!((total - crest).abs() <= 1e-12);
        let _ = CosineSpectrum::new(spec.coeffs().to_vec());
    }
}
