//! Runs one scenario and writes its artifacts:
//!
//! * `series.csv`: one row per record, columns
//!   `t, m, xi, u_x_at_0, rho_x_max, rho_x_min, u_inf, u_l2, rho_inf, rho_l2, rho_at_xi_slope, int_m`;
//! * `summary.json`: termination, rate fit, criteria, residual and bound
//!   maxima, and the full config echo;
//! * `snapshot_NNN.bin`: `N` (u64), `L` (f64), `t` (f64), then `N` values of
//!   `u` and `N` values of `rho`, all little-endian.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use dp2c::besov::{besov_norm, build_partition, BesovParams};
use dp2c::diagnostics::{
    check_linf_bound, check_rho_slope_law, check_slope_bound, classify_run, criterion_thm51,
    criterion_thm52, fit_rate, locate_min_slope, ClassifyReport, CriterionReport, DiagnosticsRecord,
    RateFit, VALIDITY_SLOPE,
};
use dp2c::solver::{evolve_with, RunOptions, RunResult};
use dp2c::{State, Termination};
use serde::Serialize;

use crate::config::{ConfigError, ScenarioSpec};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("solver rejected the scenario: {0}")]
    Solver(#[from] dp2c::Error),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Process exit status: 1 for configuration problems, 2 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Solver(_) => 1,
            HarnessError::Io { .. } => 2,
        }
    }
}

pub const SERIES_COLUMNS: [&str; 12] = [
    "t",
    "m",
    "xi",
    "u_x_at_0",
    "rho_x_max",
    "rho_x_min",
    "u_inf",
    "u_l2",
    "rho_inf",
    "rho_l2",
    "rho_at_xi_slope",
    "int_m",
];

#[derive(Debug, Clone, Serialize)]
pub struct ConservationSummary {
    pub markers: usize,
    pub max_residual: f64,
    pub order_preserving: bool,
    /// Largest distance between the tracked minimizer and the marker
    /// started at the initial minimizer, over the validity window.
    pub max_probe_offset: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundSummary {
    /// Max over records of `||u||_inf - L(t)`.
    pub linf_bound_max_excess: f64,
    /// Max of `u_x(t, 0) - u0'(0)/(1 + t u0'(0))` over the validity window.
    pub slope_bound_max_excess: Option<f64>,
    /// Max relative error of the `rho_x` law at the minimizer.
    pub rho_slope_law_max_error: Option<f64>,
    pub validity_window_records: usize,
}

/// Size of the initial fields within `dx` of `x = +-L`. Line-domain
/// statements carry over to the periodic window only when this is tiny.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryCheck {
    pub magnitude: f64,
    pub decayed: bool,
}

pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

pub fn boundary_check(s: &State) -> BoundaryCheck {
    let grid = s.grid();
    let edge = grid.half_length() - grid.dx() * (1.0 + 1e-9);
    let magnitude = grid
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() >= edge)
        .map(|(j, _)| s.u.values()[j].abs().max(s.rho.values()[j].abs()))
        .fold(0.0, f64::max);
    BoundaryCheck {
        magnitude,
        decayed: magnitude <= BOUNDARY_TOLERANCE,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BesovSummary {
    pub params: BesovParams,
    pub u_initial: f64,
    pub u_final: f64,
    pub rho_initial: f64,
    pub rho_final: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub name: String,
    pub version: String,
    pub termination: Termination,
    pub t_final: f64,
    pub records: usize,
    pub m_min: f64,
    pub boundary: BoundaryCheck,
    pub classification: ClassifyReport,
    pub fit_rate: Option<RateFit>,
    pub fit_rate_error: Option<String>,
    pub criteria: Vec<CriterionReport>,
    pub conservation: Option<ConservationSummary>,
    pub bounds: BoundSummary,
    pub besov: Vec<BesovSummary>,
    pub config: ScenarioSpec,
}

pub struct RunOutput {
    pub initial: State,
    pub result: RunResult,
    pub summary: Summary,
}

/// Integrates the scenario and assembles its summary; writes nothing.
pub fn run_spec(spec: &ScenarioSpec) -> Result<RunOutput, HarnessError> {
    spec.validate()?;
    let s0 = spec.initial_state()?;
    let diag = &spec.diagnostics;
    let crit = &diag.criteria;

    let probe_label = (diag.characteristics.enabled && diag.characteristics.probe_argmin)
        .then(|| locate_min_slope(&s0.u).0);
    let opts = RunOptions {
        markers: diag
            .characteristics
            .enabled
            .then(|| diag.characteristics.markers.unwrap_or(spec.grid.n)),
        probe_label,
        snapshot_times: diag.snapshot_times.clone(),
    };
    let result = evolve_with(&s0, spec.t_max, &spec.solver, &opts)?;
    let series = &result.series;

    let criteria = if crit.enabled {
        vec![
            criterion_thm51(&s0.u, &s0.rho, s0.c, crit.eps, crit.growth_rate, crit.s_sob)?,
            criterion_thm52(&s0.u, &s0.rho, s0.c)?,
        ]
    } else {
        Vec::new()
    };
    let symmetric = criteria.iter().find(|r| r.name == "odd_even_symmetry" && r.applicable);
    let slope_bound_max_excess = symmetric.map(|r| check_slope_bound(series, r.quantities["u0_prime_0"]));
    let rho_slope_law_max_error = symmetric.map(|r| check_rho_slope_law(series, r.quantities["rho0_prime_x0"]));

    let window = series.validity_window(VALIDITY_SLOPE);
    let conservation = result.tracking.as_ref().map(|log| ConservationSummary {
        markers: log.bundle.len(),
        max_residual: log
            .samples
            .iter()
            .map(|s| s.conservation_residual)
            .fold(0.0, f64::max),
        order_preserving: log.samples.iter().all(|s| s.order_preserving),
        max_probe_offset: log.probe.as_ref().map(|_| {
            let grid = s0.grid();
            log.samples
                .iter()
                .zip(window)
                .filter_map(|(s, r)| s.probe_position.map(|p| grid.periodic_offset(p, r.xi).abs()))
                .fold(0.0, f64::max)
        }),
    });

    let besov = if diag.besov.enabled {
        let part = build_partition(s0.grid());
        diag.besov
            .params
            .iter()
            .map(|p| BesovSummary {
                params: *p,
                u_initial: besov_norm(&s0.u, p, &part),
                u_final: besov_norm(&result.final_state.u, p, &part),
                rho_initial: besov_norm(&s0.rho, p, &part),
                rho_final: besov_norm(&result.final_state.rho, p, &part),
            })
            .collect()
    } else {
        Vec::new()
    };

    let (fit, fit_err) = match fit_rate(series) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let summary = Summary {
        name: spec.name.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        termination: result.termination,
        t_final: result.final_state.t,
        records: series.len(),
        m_min: series.records().iter().map(|r| r.m).fold(f64::INFINITY, f64::min),
        boundary: boundary_check(&s0),
        classification: classify_run(series, result.termination),
        fit_rate: fit,
        fit_rate_error: fit_err,
        criteria,
        conservation,
        bounds: BoundSummary {
            linf_bound_max_excess: check_linf_bound(series, &s0.u, &s0.rho, s0.c, crit.s_sob),
            slope_bound_max_excess,
            rho_slope_law_max_error,
            validity_window_records: window.len(),
        },
        besov,
        config: spec.clone(),
    };
    Ok(RunOutput {
        initial: s0,
        result,
        summary,
    })
}

/// Runs the scenario and writes all artifacts into `out`.
pub fn run_to_dir(spec: &ScenarioSpec, out: &Path) -> Result<RunOutput, HarnessError> {
    let output = run_spec(spec)?;
    write_artifacts(&output, out)?;
    Ok(output)
}

pub fn write_artifacts(output: &RunOutput, out: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    write_series_csv(output.result.series.records(), &out.join("series.csv"))?;
    let summary_path = out.join("summary.json");
    let json = serde_json::to_string_pretty(&output.summary).expect("summary serializes");
    fs::write(&summary_path, json + "\n").map_err(|e| HarnessError::io(&summary_path, e))?;
    for (i, snap) in output.result.snapshots.iter().enumerate() {
        let path = out.join(format!("snapshot_{i:03}.bin"));
        fs::write(&path, snapshot_bytes(snap)).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(())
}

pub fn write_series_csv(records: &[DiagnosticsRecord], path: &Path) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| HarnessError::io(path, e);
    writeln!(w, "{}", SERIES_COLUMNS.join(",")).map_err(io)?;
    for r in records {
        let row = [
            r.t,
            r.m,
            r.xi,
            r.u_x_at_0,
            r.rho_x_max,
            r.rho_x_min,
            r.u_inf,
            r.u_l2,
            r.rho_inf,
            r.rho_l2,
            r.rho_at_xi_slope,
            r.int_m,
        ];
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn snapshot_bytes(s: &State) -> Vec<u8> {
    let grid = s.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(24 + 16 * n);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&grid.half_length().to_le_bytes());
    out.extend_from_slice(&s.t.to_le_bytes());
    for v in s.u.values().iter().chain(s.rho.values()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Decoded snapshot: `(N, L, t, u, rho)`.
pub type Snapshot = (usize, f64, f64, Vec<f64>, Vec<f64>);

/// Inverse of [`snapshot_bytes`].
pub fn parse_snapshot(bytes: &[u8]) -> Option<Snapshot> {
    let word = |i: usize| -> Option<[u8; 8]> { bytes.get(8 * i..8 * i + 8)?.try_into().ok() };
    let n = u64::from_le_bytes(word(0)?) as usize;
    if bytes.len() != 24 + 16 * n {
        return None;
    }
    let l = f64::from_le_bytes(word(1)?);
    let t = f64::from_le_bytes(word(2)?);
    let vals: Vec<f64> = (0..2 * n).map(|i| f64::from_le_bytes(word(3 + i).unwrap())).collect();
    let (u, rho) = vals.split_at(n);
    Some((n, l, t, u.to_vec(), rho.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dp2c::{make_grid, RealField};

    #[test]
    fn boundary_check_examples() {
        let g = make_grid(64, 10.0).unwrap();
        let zero = boundary_check(&State::zero(&g, 1.0));
        assert!(zero.decayed && zero.magnitude == 0.0);

        let bump = RealField::from_fn(&g, |x| (-x * x).exp());
        let s = State::new(bump, RealField::zeros(&g), 1.0).unwrap();
        let b = boundary_check(&s);
        assert!(b.decayed && b.magnitude > 0.0);

        let wave = RealField::from_fn(&g, |x| (std::f64::consts::PI * x / 10.0).cos());
        let s = State::new(RealField::zeros(&g), wave, 1.0).unwrap();
        let b = boundary_check(&s);
        assert!(!b.decayed && (b.magnitude - 1.0).abs() < 1e-12);
    }
}
