//! Persistence and interchange formats: JSON profile records, branch CSV
//! export with an optional JSON sidecar, and the vertical alignment used for
//! shape comparisons.
//!
//! All numeric output uses Rust's shortest round-trip decimal formatting, so
//! re-parsing a written file reproduces every float bit for bit.  Files use
//! '.' as the decimal separator and LF line endings regardless of locale.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::continuation::{Branch, ParamMode};
use crate::spectral::{cosine_synthesis, CosineSpectrum, DispersionModel};
use crate::steady::{waveheight, SolverReport, WaveProfile};

/// Current on-disk schema for profile and branch records.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StorageError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// serde_json errors carry line and column context.
    #[error("malformed record: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema version {found} (expected {expected})")]
    Version { found: u64, expected: u32 },
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("refusing to export an empty branch")]
    EmptyBranch,
}

/// Solver context stored alongside a profile.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProfileMetadata {
    pub newton_tol: f64,
    pub newton_iters: usize,
    /// Final sup-norm of the collocation residual.
    pub residual_norm: f64,
}

/// A wave profile as written to disk: one JSON object per file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProfileRecord {
    pub schema_version: u32,
    pub model: DispersionModel,
    pub k: u32,
    pub n: usize,
    pub mu: f64,
    pub height: f64,
    /// Orthonormal-weighted discrete cosine coefficients Φ(l).
    pub cosine_coeffs: Vec<f64>,
    pub metadata: ProfileMetadata,
}

impl ProfileRecord {
    pub fn from_solution(profile: &WaveProfile, report: &SolverReport, newton_tol: f64) -> Self {
        ProfileRecord {
            schema_version: SCHEMA_VERSION,
            model: profile.model(),
            k: profile.fundamental(),
            n: profile.n_points(),
            mu: profile.mu(),
            height: waveheight(profile),
            cosine_coeffs: profile.spectrum().coeffs().to_vec(),
            metadata: ProfileMetadata {
                newton_tol,
                newton_iters: report.iterations,
                residual_norm: report.final_residual(),
            },
        }
    }

    pub fn to_profile(&self) -> WaveProfile {
        WaveProfile::new(
            self.model,
            self.k,
            self.mu,
            CosineSpectrum::new(self.cosine_coeffs.clone()),
        )
    }
}

pub fn save_profile(record: &ProfileRecord, path: &Path) -> Result<(), StorageError> {
    let json = serde_json::to_string_pretty(record)?;
    fs::write(path, json + "\n")?;
    Ok(())
}

pub fn load_profile(path: &Path) -> Result<ProfileRecord, StorageError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let found = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .unwrap_or(0);
    if found != SCHEMA_VERSION as u64 {
        return Err(StorageError::Version {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(serde_json::from_value(value)?)
}

/// One CSV row of a branch.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BranchRow {
    pub index: usize,
    pub mu: f64,
    pub height: f64,
    pub param_mode: ParamMode,
    pub newton_iters: usize,
    pub residual_norm: f64,
    pub n: usize,
}

/// Branch data as written to the JSON sidecar; the CSV keeps only the rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchRecord {
    pub schema_version: u32,
    pub model: DispersionModel,
    pub k: u32,
    pub rows: Vec<BranchRow>,
    pub turning_point_index: Option<usize>,
    pub termination: crate::continuation::Termination,
    /// Full profiles, when requested at export time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profiles: Option<Vec<ProfileRecord>>,
}

impl BranchRecord {
    pub fn from_branch(branch: &Branch, model: DispersionModel, with_profiles: bool) -> Self {
        let rows = branch
            .points
            .iter()
            .enumerate()
            .map(|(index, p)| BranchRow {
                index,
                mu: p.mu,
                height: p.height,
                param_mode: p.param_mode,
                newton_iters: p.report.iterations,
                residual_norm: p.report.final_residual(),
                n: p.profile.n_points(),
            })
            .collect();
        let profiles = with_profiles.then(|| {
            branch
                .points
                .iter()
                .map(|p| ProfileRecord::from_solution(&p.profile, &p.report, f64::NAN))
                .collect()
        });
        BranchRecord {
            schema_version: SCHEMA_VERSION,
            model,
            k: branch.k,
            rows,
            turning_point_index: branch.turning_point_index,
            termination: branch.termination,
            profiles,
        }
    }
}

pub fn save_branch_record(record: &BranchRecord, path: &Path) -> Result<(), StorageError> {
    let json = serde_json::to_string_pretty(record)?;
    fs::write(path, json + "\n")?;
    Ok(())
}

pub fn load_branch_record(path: &Path) -> Result<BranchRecord, StorageError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let found = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .unwrap_or(0);
    if found != SCHEMA_VERSION as u64 {
        return Err(StorageError::Version {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(serde_json::from_value(value)?)
}

const BRANCH_CSV_HEADER: &str = "index,mu,height,param_mode,newton_iters,residual_norm,N";

fn mode_str(mode: ParamMode) -> &'static str {
    match mode {
        ParamMode::Speed => "speed",
        ParamMode::Height => "height",
    }
}

/// Write a branch as CSV with the fixed column set
/// `index,mu,height,param_mode,newton_iters,residual_norm,N`.
pub fn export_branch_csv(branch: &Branch, path: &Path) -> Result<(), StorageError> {
    if branch.points.is_empty() {
        return Err(StorageError::EmptyBranch);
    }
    let mut out = String::new();
    out.push_str(BRANCH_CSV_HEADER);
    out.push('\n');
    for (index, p) in branch.points.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            index,
            p.mu,
            p.height,
            mode_str(p.param_mode),
            p.report.iterations,
            p.report.final_residual(),
            p.profile.n_points()
        )
        .expect("writing to a String cannot fail");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parse a branch CSV produced by [`export_branch_csv`].
pub fn parse_branch_csv(path: &Path) -> Result<Vec<BranchRow>, StorageError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == BRANCH_CSV_HEADER => {}
        other => {
            return Err(StorageError::Csv {
                line: 1,
                message: format!(
                    "expected header {BRANCH_CSV_HEADER:?}, found {:?}",
                    other.map(|(_, l)| l).unwrap_or("")
                ),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(StorageError::Csv {
                line: i + 1,
                message: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let err = |message: String| StorageError::Csv {
            line: i + 1,
            message,
        };
        let param_mode = match fields[3] {
            "speed" => ParamMode::Speed,
            "height" => ParamMode::Height,
            other => return Err(err(format!("unknown param_mode {other:?}"))),
        };
        rows.push(BranchRow {
            index: fields[0]
                .parse()
                .map_err(|e| err(format!("index: {e}")))?,
            mu: fields[1].parse().map_err(|e| err(format!("mu: {e}")))?,
            height: fields[2]
                .parse()
                .map_err(|e| err(format!("height: {e}")))?,
            param_mode,
            newton_iters: fields[4]
                .parse()
                .map_err(|e| err(format!("newton_iters: {e}")))?,
            residual_norm: fields[5]
                .parse()
                .map_err(|e| err(format!("residual_norm: {e}")))?,
            n: fields[6].parse().map_err(|e| err(format!("N: {e}")))?,
        });
    }
    Ok(rows)
}

/// Write evolution snapshots in long format (`t,x,eta`), one row per grid
/// point per snapshot.
pub fn export_snapshots_csv(
    snapshots: &[crate::evolution::EvolutionState],
    path: &Path,
) -> Result<(), StorageError> {
    let mut out = String::from("t,x,eta\n");
    for state in snapshots {
        let grid = crate::evolution::evolution_grid(state.n_modes());
        for (x, v) in grid.iter().zip(state.grid_values()) {
            writeln!(out, "{},{},{}", state.time(), x, v)
                .expect("writing to a String cannot fail");
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write a paired shape comparison (`x,whitham,kdv`) on a common grid.
pub fn export_comparison_csv(
    grid: &[f64],
    whitham: &[f64],
    kdv: &[f64],
    path: &Path,
) -> Result<(), StorageError> {
    let mut out = String::from("x,whitham,kdv\n");
    for i in 0..grid.len() {
        writeln!(out, "{},{},{}", grid[i], whitham[i], kdv[i])
            .expect("writing to a String cannot fail");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Evaluate two waves on a common grid and shift each vertically so its
/// minimum sits on the x-axis (the Fig. 7 plotting convention; crests are at
/// x = 0 by the branch normalization).
pub fn align_for_comparison(
    profile_a: &WaveProfile,
    profile_b: &WaveProfile,
    eval_grid: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let align = |spectrum: &CosineSpectrum| {
        let mut values = cosine_synthesis(spectrum, eval_grid);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        for v in &mut values {
            *v -= min;
        }
        values
    };
    (align(profile_a.spectrum()), align(profile_b.spectrum()))
}

/// Width of an aligned wave (minimum 0, crest at x = 0) at half its crest
/// height, measured on the evaluation grid with linear interpolation.
///
/// The grid is expected to cover `[0, 2π)` in increasing order.
pub fn half_height_width(aligned: &[f64], eval_grid: &[f64]) -> f64 {
    assert_eq!(aligned.len(), eval_grid.len());
    let crest = aligned.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let target = 0.5 * crest;
    for i in 1..aligned.len() {
        if aligned[i - 1] >= target && aligned[i] < target {
            let t = (aligned[i - 1] - target) / (aligned[i - 1] - aligned[i]);
            let x = eval_grid[i - 1] + t * (eval_grid[i] - eval_grid[i - 1]);
            return 2.0 * x;
        }
    }
    // A constant profile never crosses; report a full wavelength.
    2.0 * std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::Termination;
    use crate::spectral::CollocationGrid;
    use crate::steady::{newton_fixed_speed, NewtonOptions};
    use approx::assert_abs_diff_eq;

    fn sample_profile() -> (WaveProfile, SolverReport) {
        let grid = CollocationGrid::new(16);
        let (guess, mu) = crate::asymptotics::whitham_expansion(0.05, grid.points());
        newton_fixed_speed(&guess, mu, DispersionModel::Whitham, 1, &NewtonOptions::default())
            .unwrap()
    }

    #[test]
    fn profile_roundtrip_is_bitwise() {
        let (profile, report) = sample_profile();
        let record = ProfileRecord::from_solution(&profile, &report, 1e-12);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wave.json");
        save_profile(&record, &path).unwrap();
        let loaded = load_profile(&path).unwrap();
        assert_eq!(loaded.cosine_coeffs, record.cosine_coeffs);
        assert_eq!(loaded.mu.to_bits(), record.mu.to_bits());
        assert_eq!(loaded, record);
    }

    #[test]
    fn version_mismatch_is_reported() {
        let (profile, report) = sample_profile();
        let mut record = ProfileRecord::from_solution(&profile, &report, 1e-12);
        record.schema_version = 99;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wave.json");
        save_profile(&record, &path).unwrap();
        match load_profile(&path) {
            Err(StorageError::Version { found: 99, expected }) => {
                assert_eq!(expected, SCHEMA_VERSION)
            }
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.json");
        fs::write(&path, "{\n  \"schema_version\": 1,\n  oops\n}").unwrap();
        let err = load_profile(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "message was {msg:?}");
    }

    #[test]
    fn csv_roundtrip_and_header() {
        let (profile, report) = sample_profile();
        let branch = Branch {
            k: 1,
            points: vec![crate::continuation::BranchPoint {
                mu: profile.mu(),
                height: waveheight(&profile),
                profile,
                param_mode: ParamMode::Speed,
                report,
            }],
            turning_point_index: None,
            termination: Termination::HeightLimit,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("branch.csv");
        export_branch_csv(&branch, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], BRANCH_CSV_HEADER);

        let rows = parse_branch_csv(&path).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mu.to_bits(), branch.points[0].mu.to_bits());
        assert_eq!(rows[0].height.to_bits(), branch.points[0].height.to_bits());
        assert_eq!(rows[0].param_mode, ParamMode::Speed);
    }

    #[test]
    fn csv_parse_flags_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("branch.csv");
        fs::write(&path, format!("{BRANCH_CSV_HEADER}\n0,0.8,0.1,speed,3\n")).unwrap();
        match parse_branch_csv(&path) {
            Err(StorageError::Csv { line: 2, .. }) => {}
            other => panic!("expected CSV error at line 2, got {other:?}"),
        }
    }

    #[test]
    fn alignment_zeroes_minima() {
        let (profile, _) = sample_profile();
        let grid: Vec<f64> = (0..128)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 128.0)
            .collect();
        let (a, b) = align_for_comparison(&profile, &profile, &grid);
        assert_eq!(a, b);
        let min = a.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(min, 0.0, epsilon = 1e-15);

        // A constant profile aligns to all zeros.
        let constant =
            WaveProfile::from_values(DispersionModel::Whitham, 1, 0.9, &[-0.1; 16]).unwrap();
        let (c, _) = align_for_comparison(&constant, &constant, &grid);
        for v in c {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn half_height_width_of_cosine() {
        // 1 + cos x has crest 2 at x = 0 and crosses 1 at x = pi/2.
        let grid: Vec<f64> = (0..4096)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 4096.0)
            .collect();
        let values: Vec<f64> = grid.iter().map(|&x| 1.0 + x.cos()).collect();
        let w = half_height_width(&values, &grid);
        assert_abs_diff_eq!(w, std::f64::consts::PI, epsilon = 1e-5);
    }
}
