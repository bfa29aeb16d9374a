//! Scenario configuration: the JSON schema, dotted-path overrides and
//! construction of the initial state.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use dp2c::besov::BesovParams;
use dp2c::grid::Grid;
use dp2c::nonlocal::{peakon_field, smoothed_peakon};
use dp2c::{make_grid, RealField, SolverConfig, State};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("bad override `{0}`: {1}")]
    Override(String, String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Initial data. Mode `j` (1-based) of a coefficient list has wavenumber
/// `j pi / L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// Periodized peakon `a cosh(L - |x|) / cosh L`, `rho = 0`.
    Peakon { amplitude: f64 },
    /// Peakon mollified by `lambda^2 (lambda^2 - d_xx)^{-1}`, `rho = 0`.
    SmoothedPeakon { amplitude: f64, lambda: f64 },
    /// `u = sum_j u_sin[j] sin + u_cos[j] cos`,
    /// `rho = rho_mean + sum_j rho_sin[j] sin + rho_cos[j] cos`.
    SineFamily {
        #[serde(default)]
        u_sin: Vec<f64>,
        #[serde(default)]
        u_cos: Vec<f64>,
        #[serde(default)]
        rho_mean: f64,
        #[serde(default)]
        rho_sin: Vec<f64>,
        #[serde(default)]
        rho_cos: Vec<f64>,
    },
    /// Odd `u = sum_j u_sin[j] sin`, even `rho = sum_j rho_cos[j] (1 - cos)`
    /// vanishing at the origin.
    Thm52Family {
        u_sin: Vec<f64>,
        #[serde(default)]
        rho_cos: Vec<f64>,
    },
    /// Text file with one `u rho` pair per line, one line per grid node.
    CustomSamples { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub half_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CharacteristicsFlags {
    pub enabled: bool,
    /// Number of markers; the grid size when absent.
    pub markers: Option<usize>,
    /// Track one extra marker started at the minimizer of `u0'`.
    pub probe_argmin: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct BesovFlags {
    pub enabled: bool,
    pub params: Vec<BesovParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriteriaFlags {
    pub enabled: bool,
    pub eps: f64,
    /// Density growth rate `M` of the slope-threshold criterion; the
    /// default rule `2 max(1, ||u0'||_inf)` when absent.
    pub growth_rate: Option<f64>,
    pub s_sob: f64,
}

impl Default for CriteriaFlags {
    fn default() -> Self {
        Self {
            enabled: true,
            eps: 1.0,
            growth_rate: None,
            s_sob: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsFlags {
    pub characteristics: CharacteristicsFlags,
    pub besov: BesovFlags,
    pub criteria: CriteriaFlags,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub initial_data: InitialData,
    pub c: f64,
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    pub t_max: f64,
    #[serde(default)]
    pub diagnostics: DiagnosticsFlags,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        make_grid(self.grid.n, self.grid.half_length)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.solver
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !self.c.is_finite() {
            return invalid("c must be finite".into());
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return invalid(format!("t_max must be positive, got {}", self.t_max));
        }
        match &self.initial_data {
            InitialData::Peakon { amplitude } | InitialData::SmoothedPeakon { amplitude, .. }
                if !amplitude.is_finite() =>
            {
                return invalid("peakon amplitude must be finite".into());
            }
            InitialData::SmoothedPeakon { lambda, .. } if !(*lambda > 0.0) => {
                return invalid("smoothing parameter lambda must be positive".into());
            }
            InitialData::CustomSamples { path } if !path.is_file() => {
                return invalid(format!("sample file {} does not exist", path.display()));
            }
            _ => {}
        }
        let d = &self.diagnostics;
        if d.characteristics.markers == Some(0) || d.characteristics.markers > Some(self.grid.n) {
            return invalid("marker count must lie in 1..=N".into());
        }
        for p in &d.besov.params {
            p.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if !(d.criteria.eps > 0.0) {
            return invalid("criteria.eps must be positive".into());
        }
        if !(d.criteria.s_sob > 1.5) {
            return invalid("criteria.s_sob must exceed 3/2".into());
        }
        if matches!(d.criteria.growth_rate, Some(m) if !(m > 0.0)) {
            return invalid("criteria.growth_rate must be positive".into());
        }
        if d.snapshot_times.iter().any(|t| !(*t >= 0.0 && *t <= self.t_max)) {
            return invalid("snapshot times must lie in [0, t_max]".into());
        }
        Ok(())
    }

    pub fn make_grid(&self) -> Result<Arc<Grid>, ConfigError> {
        make_grid(self.grid.n, self.grid.half_length)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn initial_state(&self) -> Result<State, ConfigError> {
        let grid = self.make_grid()?;
        let (u, rho) = initial_fields(&self.initial_data, &grid)?;
        State::new(u, rho, self.c).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

fn fourier_sum(grid: &Arc<Grid>, sin: &[f64], cos: &[f64]) -> RealField {
    let k = PI / grid.half_length();
    RealField::from_fn(grid, |x| {
        let s: f64 = sin
            .iter()
            .enumerate()
            .map(|(j, a)| a * ((j + 1) as f64 * k * x).sin())
            .sum();
        let c: f64 = cos
            .iter()
            .enumerate()
            .map(|(j, a)| a * ((j + 1) as f64 * k * x).cos())
            .sum();
        s + c
    })
}

fn initial_fields(
    data: &InitialData,
    grid: &Arc<Grid>,
) -> Result<(RealField, RealField), ConfigError> {
    let zero = RealField::zeros(grid);
    let invalid = |e: dp2c::Error| ConfigError::Invalid(e.to_string());
    Ok(match data {
        InitialData::Zero => (zero.clone(), zero),
        InitialData::Peakon { amplitude } => (peakon_field(*amplitude, 0.0, grid).map_err(invalid)?, zero),
        InitialData::SmoothedPeakon { amplitude, lambda } => (
            smoothed_peakon(*amplitude, *lambda, 0.0, grid).map_err(invalid)?,
            zero,
        ),
        InitialData::SineFamily {
            u_sin,
            u_cos,
            rho_mean,
            rho_sin,
            rho_cos,
        } => {
            let u = fourier_sum(grid, u_sin, u_cos);
            let rho = fourier_sum(grid, rho_sin, rho_cos).map(|v| v + rho_mean);
            (u, rho)
        }
        InitialData::Thm52Family { u_sin, rho_cos } => {
            let u = fourier_sum(grid, u_sin, &[]);
            let total: f64 = rho_cos.iter().sum();
            let rho = fourier_sum(grid, &[], rho_cos).map(|v| total - v);
            (u, rho)
        }
        InitialData::CustomSamples { path } => read_samples(path, grid)?,
    })
}

fn read_samples(path: &Path, grid: &Arc<Grid>) -> Result<(RealField, RealField), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut u = Vec::with_capacity(grid.n());
    let mut rho = Vec::with_capacity(grid.n());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| ConfigError::Invalid(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if vals.len() != 2 {
            return Err(ConfigError::Invalid(format!(
                "{}:{}: expected two columns `u rho`",
                path.display(),
                i + 1
            )));
        }
        u.push(vals[0]);
        rho.push(vals[1]);
    }
    let field = |v: Vec<f64>| {
        RealField::new(grid.clone(), v).map_err(|e| {
            ConfigError::Invalid(format!("{}: {e}", path.display()))
        })
    };
    Ok((field(u)?, field(rho)?))
}

/// Reads a scenario file, applies `key=value` overrides and validates.
/// Relative sample paths are resolved against the file's directory.
pub fn load_spec(path: &Path, overrides: &[String]) -> Result<ScenarioSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let mut spec = spec_from_value(value)?;
    if let InitialData::CustomSamples { path: p } = &mut spec.initial_data {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                *p = dir.join(&*p);
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}

pub fn spec_from_value(value: Value) -> Result<ScenarioSpec, ConfigError> {
    serde_json::from_value(value).map_err(|e| ConfigError::Parse(e.to_string()))
}

/// Sets the node addressed by a dotted path (`solver.cfl`,
/// `initial_data.u_sin.0`). The value is parsed as JSON when possible and
/// taken as a string otherwise.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let err = |m: &str| ConfigError::Override(assignment.to_string(), m.to_string());
    let (path, raw) = assignment.split_once('=').ok_or_else(|| err("expected key=value"))?;
    let new: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(root, path, new).map_err(|m| err(&m))
}

pub fn set_path(root: &mut Value, path: &str, new: Value) -> Result<(), String> {
    if path.is_empty() {
        return Err("empty key".into());
    }
    let keys: Vec<&str> = path.split('.').collect();
    let (last, parents) = keys.split_last().expect("path has at least one key");
    let mut node = root;
    for key in parents {
        node = match node {
            Value::Object(map) => map
                .entry(key.to_string())
                .or_insert_with(|| Value::Object(Default::default())),
            Value::Array(items) => {
                let i: usize = key.parse().map_err(|_| format!("`{key}` is not an index"))?;
                items.get_mut(i).ok_or_else(|| format!("index {i} out of range"))?
            }
            _ => return Err(format!("`{key}` does not address an object or array")),
        };
    }
    match node {
        Value::Object(map) => {
            map.insert(last.to_string(), new);
        }
        Value::Array(items) => {
            let i: usize = last.parse().map_err(|_| format!("`{last}` is not an index"))?;
            let slot = items.get_mut(i).ok_or_else(|| format!("index {i} out of range"))?;
            *slot = new;
        }
        _ => return Err(format!("`{last}` does not address an object or array")),
    }
    Ok(())
}

pub fn get_path<'a>(root: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(root, |node, key| match node {
        Value::Object(map) => map.get(key),
        Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get(i)),
        _ => None,
    })
}
