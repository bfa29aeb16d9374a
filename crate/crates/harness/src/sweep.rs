//! Parameter sweeps: one run per value of a numeric config path, executed on
//! a rayon pool, each in its own `run_NNN` directory, plus a `sweep.csv`
//! table with one row per value.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde_json::Value;

use crate::config::{get_path, set_path, spec_from_value, ConfigError, ScenarioSpec};
use crate::runner::{run_to_dir, HarnessError, Summary};

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<Summary, String>,
}

/// Builds one scenario per value. Fails before any run if the axis is not a
/// numeric field or any resulting scenario is invalid.
pub fn sweep_specs(base: &ScenarioSpec, axis: &str, values: &[f64]) -> Result<Vec<ScenarioSpec>, ConfigError> {
    let root = serde_json::to_value(base).map_err(|e| ConfigError::Parse(e.to_string()))?;
    match get_path(&root, axis) {
        Some(Value::Number(_)) => {}
        Some(_) => {
            return Err(ConfigError::Override(axis.into(), "sweep axis must be a numeric field".into()))
        }
        None => return Err(ConfigError::Override(axis.into(), "no such field".into())),
    }
    values
        .iter()
        .map(|&v| {
            let num = serde_json::Number::from_f64(v)
                .ok_or_else(|| ConfigError::Override(axis.into(), format!("non-finite value {v}")))?;
            let mut r = root.clone();
            set_path(&mut r, axis, Value::Number(num)).map_err(|e| ConfigError::Override(axis.into(), e))?;
            let spec = spec_from_value(r)?;
            spec.validate()?;
            Ok(spec)
        })
        .collect()
}

/// Runs the sweep on `threads` workers (0 means rayon's default). Per-run
/// failures become rows with an error message; only setup and table I/O
/// fail the whole sweep.
pub fn run_sweep(
    base: &ScenarioSpec,
    axis: &str,
    values: &[f64],
    threads: usize,
    out: &Path,
) -> Result<Vec<SweepRow>, HarnessError> {
    let specs = sweep_specs(base, axis, values)?;
    fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let rows: Vec<SweepRow> = pool.install(|| {
        specs
            .par_iter()
            .zip(values.par_iter())
            .enumerate()
            .map(|(i, (spec, &value))| {
                let dir = out.join(format!("run_{i:03}"));
                SweepRow {
                    value,
                    outcome: run_to_dir(spec, &dir).map(|o| o.summary).map_err(|e| e.to_string()),
                }
            })
            .collect()
    });
    write_sweep_csv(&rows, &out.join("sweep.csv"))?;
    Ok(rows)
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<(), HarnessError> {
    let io = |e| HarnessError::io(path, e);
    let mut f = fs::File::create(path).map_err(io)?;
    writeln!(
        f,
        "value,termination,t_final,m_min,t_est,slope,initial_slope_threshold,odd_even_symmetry,error"
    )
    .map_err(io)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for row in rows {
        let line = match &row.outcome {
            Ok(s) => {
                let predicted = |name: &str| s.criteria.iter().find(|c| c.name == name).and_then(|c| c.predicted_t);
                let term = serde_json::to_value(s.termination).expect("termination serializes");
                format!(
                    "{:e},{},{:e},{:e},{},{},{},{},",
                    row.value,
                    term.as_str().unwrap_or_default(),
                    s.t_final,
                    s.m_min,
                    opt(s.fit_rate.map(|f| f.t_est)),
                    opt(s.fit_rate.map(|f| f.slope)),
                    opt(predicted("initial_slope_threshold")),
                    opt(predicted("odd_even_symmetry")),
                )
            }
            Err(e) => format!("{:e},,,,,,,,\"{}\"", row.value, e.replace('"', "'")),
        };
        writeln!(f, "{line}").map_err(io)?;
    }
    Ok(())
}
