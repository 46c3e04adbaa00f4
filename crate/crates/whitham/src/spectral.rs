//! Cosine collocation basis, dispersion symbols and the discrete nonlocal
//! operator.
//!
//! Even 2π-periodic functions are represented in the span of
//! `cos(l x), l = 0..N-1`, sampled at the midpoint nodes
//! `x_n = π(2n-1)/(2N), n = 1..N` of `(0, π)`.  On that grid the cosine
//! family is orthogonal, so the weighted transform pair below is an exact
//! inverse pair and the convolution operator acts diagonally on the
//! coefficients:
//!
//! ```text
//! Φ(l) = w(l) Σ_n φ(x_n) cos(l x_n),       φ(x) = Σ_l w(l) Φ(l) cos(l x),
//! w(0) = sqrt(1/N),  w(l) = sqrt(2/N) for l ≥ 1.
//! ```
//!
//! The transforms are plain `O(N²)` sums; the steady solves never need more
//! than a couple thousand modes, where dense linear algebra dominates anyway.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Errors from grid construction and symbol evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    /// Cosine analysis needs at least two collocation points.
    #[error("invalid collocation grid: N = {0}, need N >= 2")]
    InvalidGrid(usize),
    /// The nonlocal KdV symbol depends on the wave speed.
    #[error("dispersion model requires a wave speed mu > 0 (got {0:?})")]
    MissingSpeed(Option<f64>),
}

/// Which Fourier multiplier governs the equation.
///
/// `Whitham` carries the full water-wave phase speed `sqrt(tanh(k)/k)`;
/// `KdvNonlocal` is the smoothing form of the KdV equation, whose symbol
/// `1/(1 + k²/(6μ))` depends on the wave speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionModel {
    Whitham,
    KdvNonlocal,
}

impl DispersionModel {
    /// True iff the multiplier needs `mu` to be evaluated.
    pub fn speed_dependent(self) -> bool {
        matches!(self, DispersionModel::KdvNonlocal)
    }

    /// Multiplier symbol at wavenumber `k`.
    ///
    /// Both symbols equal 1 at `k = 0` and decrease strictly with `k`,
    /// staying in `(0, 1]`.  The Whitham value at `k = 0` is the limit of
    /// `sqrt(tanh(k)/k)`, returned exactly as 1 rather than evaluated.
    pub fn symbol(self, k: f64, mu: Option<f64>) -> Result<f64, SpectralError> {
        debug_assert!(k >= 0.0, "symbol is defined for k >= 0");
        match self {
            DispersionModel::Whitham => {
                if k == 0.0 {
                    Ok(1.0)
                } else {
                    Ok((k.tanh() / k).sqrt())
                }
            }
            DispersionModel::KdvNonlocal => match mu {
                Some(mu) if mu > 0.0 => Ok(1.0 / (1.0 + k * k / (6.0 * mu))),
                other => Err(SpectralError::MissingSpeed(other)),
            },
        }
    }

    /// Derivative of the symbol with respect to `mu` (zero for Whitham).
    ///
    /// Needed for the speed column of the augmented Jacobian in
    /// waveheight-parametrized solves.
    pub(crate) fn symbol_dmu(self, k: f64, mu: Option<f64>) -> Result<f64, SpectralError> {
        match self {
            DispersionModel::Whitham => Ok(0.0),
            DispersionModel::KdvNonlocal => match mu {
                // d/dmu [6mu/(6mu + k^2)] = 6 k^2 / (6mu + k^2)^2
                Some(mu) if mu > 0.0 => {
                    let d = 6.0 * mu + k * k;
                    Ok(6.0 * k * k / (d * d))
                }
                other => Err(SpectralError::MissingSpeed(other)),
            },
        }
    }
}

/// Midpoint collocation grid `x_n = π(2n-1)/(2N)` on `(0, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    points: Vec<f64>,
}

impl CollocationGrid {
    /// Build the N-point grid.  Any `n >= 1` is a valid grid; the analysis
    /// transform separately insists on `n >= 2`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "collocation grid needs at least one point");
        let points = (1..=n)
            .map(|i| PI * (2.0 * i as f64 - 1.0) / (2.0 * n as f64))
            .collect();
        CollocationGrid { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Orthonormal weight `w(l)`: `sqrt(1/N)` for the mean mode, `sqrt(2/N)` above.
fn weight(l: usize, n: usize) -> f64 {
    if l == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

/// Discrete cosine coefficients `Φ(l)`, `l = 0..N-1`, of an even periodic
/// function sampled on the matching [`CollocationGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineSpectrum {
    coeffs: Vec<f64>,
}

impl CosineSpectrum {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "spectrum needs at least one mode");
        CosineSpectrum { coeffs }
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `cos(l x)` in function space, i.e. `w(l) Φ(l)`.
    pub fn mode_amplitude(&self, l: usize) -> f64 {
        if l < self.coeffs.len() {
            weight(l, self.coeffs.len()) * self.coeffs[l]
        } else {
            0.0
        }
    }

    /// Zero-pad to `n_modes` (used when interpolating onto a finer grid).
    /// The stored weights are grid-size dependent, so padding rescales.
    pub fn zero_padded(&self, n_modes: usize) -> CosineSpectrum {
        assert!(n_modes >= self.coeffs.len());
        let n_old = self.coeffs.len();
        let mut coeffs = vec![0.0; n_modes];
        for (l, &c) in self.coeffs.iter().enumerate() {
            coeffs[l] = c * weight(l, n_old) / weight(l, n_modes);
        }
        CosineSpectrum { coeffs }
    }
}

/// Forward transform: values at the `N` collocation points to coefficients.
pub fn cosine_analysis(values: &[f64]) -> Result<CosineSpectrum, SpectralError> {
    let n = values.len();
    if n < 2 {
        return Err(SpectralError::InvalidGrid(n));
    }
    let grid = CollocationGrid::new(n);
    let mut coeffs = vec![0.0; n];
    for (l, c) in coeffs.iter_mut().enumerate() {
        let sum: f64 = grid
            .points()
            .iter()
            .zip(values)
            .map(|(&x, &v)| v * (l as f64 * x).cos())
            .sum();
        *c = weight(l, n) * sum;
    }
    Ok(CosineSpectrum { coeffs })
}

/// Evaluate the cosine series at arbitrary points.
///
/// The points need not belong to the native grid; this is how profiles are
/// interpolated onto finer grids and how crest/trough values `φ(0)`, `φ(π/k)`
/// are read off.
pub fn cosine_synthesis(spectrum: &CosineSpectrum, eval_points: &[f64]) -> Vec<f64> {
    let n = spectrum.n_modes();
    eval_points
        .iter()
        .map(|&x| {
            (0..n)
                .map(|l| weight(l, n) * spectrum.coeffs[l] * (l as f64 * x).cos())
                .sum()
        })
        .collect()
}

/// Apply the multiplier diagonally: `Φ_out(l) = m(l) Φ_in(l)`.
pub fn apply_multiplier(
    spectrum: &CosineSpectrum,
    model: DispersionModel,
    mu: Option<f64>,
) -> Result<CosineSpectrum, SpectralError> {
    let coeffs = spectrum
        .coeffs
        .iter()
        .enumerate()
        .map(|(l, &c)| Ok(model.symbol(l as f64, mu)? * c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CosineSpectrum { coeffs })
}

/// Dense collocation matrix of the nonlocal operator,
/// `[K](m,n) = Σ_l w²(l) m(l) cos(l x_n) cos(l x_m)`.
///
/// Assembled as `Cᵀ diag(m) C` with `C(l,n) = w(l) cos(l x_n)`, which keeps
/// it symmetric to the last bit and agrees with [`apply_multiplier`] up to
/// roundoff.
pub fn operator_matrix(
    model: DispersionModel,
    grid: &CollocationGrid,
    mu: Option<f64>,
) -> Result<DMatrix<f64>, SpectralError> {
    let symbols: Vec<f64> = (0..grid.len())
        .map(|l| model.symbol(l as f64, mu))
        .collect::<Result<_, _>>()?;
    Ok(matrix_from_symbol_values(grid, &symbols))
}

/// Same assembly as [`operator_matrix`] for the mu-derivative of the symbol.
pub(crate) fn operator_matrix_dmu(
    model: DispersionModel,
    grid: &CollocationGrid,
    mu: Option<f64>,
) -> Result<DMatrix<f64>, SpectralError> {
    let symbols: Vec<f64> = (0..grid.len())
        .map(|l| model.symbol_dmu(l as f64, mu))
        .collect::<Result<_, _>>()?;
    Ok(matrix_from_symbol_values(grid, &symbols))
}

fn matrix_from_symbol_values(grid: &CollocationGrid, symbols: &[f64]) -> DMatrix<f64> {
    let n = grid.len();
    let basis = DMatrix::from_fn(n, n, |l, j| {
        weight(l, n) * (l as f64 * grid.points()[j]).cos()
    });
    let mut scaled = basis.clone();
    for (l, mut row) in scaled.row_iter_mut().enumerate() {
        row *= symbols[l];
    }
    basis.transpose() * scaled
}

/// Apply the operator via transforms (analysis, diagonal scaling, synthesis
/// at the native grid).  Used by the tests as the second route of the
/// matrix/transform agreement check.
pub fn apply_operator_at_grid(
    values: &[f64],
    model: DispersionModel,
    mu: Option<f64>,
) -> Result<Vec<f64>, SpectralError> {
    let spec = cosine_analysis(values)?;
    let scaled = apply_multiplier(&spec, model, mu)?;
    let grid = CollocationGrid::new(values.len());
    Ok(cosine_synthesis(&scaled, grid.points()))
}

/// Pointwise square at the collocation points as a `DVector`.
pub(crate) fn pointwise_square(values: &DVector<f64>) -> DVector<f64> {
    values.component_mul(values)
}
