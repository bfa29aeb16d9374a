//! `dp2c` command line: `run`, `sweep`, `verify` and `scenario`.
//!
//! Exit codes: 0 success (blow-up terminations included), 1 config error,
//! 2 I/O error, 3 non-finite state, 4 acceptance failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dp2c::Termination;
use dp2c_harness::acceptance;
use dp2c_harness::config::{load_spec, spec_from_value, ConfigError, ScenarioSpec};
use dp2c_harness::runner::{run_to_dir, HarnessError};
use dp2c_harness::scenarios;
use dp2c_harness::sweep::run_sweep;

#[derive(Parser)]
#[command(name = "dp2c", version, about = "Two-component Degasperis-Procesi simulator and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// JSON scenario file.
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Registered scenario name, used instead of a config file.
    #[arg(long)]
    scenario: Option<String>,
    /// Dotted-path override, e.g. `grid.n=2048` (repeatable).
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write series.csv, summary.json and snapshots.
    Run(SpecArgs),
    /// Run one scenario per value of a numeric field and write sweep.csv.
    Sweep {
        #[command(flatten)]
        spec: SpecArgs,
        /// Dotted path of the swept field, e.g. `c`.
        #[arg(long)]
        axis: String,
        /// Comma-separated values; an empty list gives an empty table.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_values)]
        values: Values,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Run the acceptance suite.
    Verify,
    /// Print a registered scenario as a config file, or list the names.
    Scenario { name: Option<String> },
}

#[derive(Clone)]
struct Values(Vec<f64>);

fn parse_values(s: &str) -> Result<Values, String> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<_, _>>()
        .map(Values)
}

fn resolve_spec(args: &SpecArgs) -> Result<ScenarioSpec, ConfigError> {
    match (&args.config, &args.scenario) {
        (Some(path), _) => load_spec(path, &args.overrides),
        (None, Some(name)) => {
            let spec = scenarios::by_name(name)
                .ok_or_else(|| ConfigError::Invalid(format!("unknown scenario `{name}`")))?;
            let mut value = serde_json::to_value(spec).map_err(|e| ConfigError::Parse(e.to_string()))?;
            for o in &args.overrides {
                dp2c_harness::config::apply_override(&mut value, o)?;
            }
            let spec = spec_from_value(value)?;
            spec.validate()?;
            Ok(spec)
        }
        (None, None) => Err(ConfigError::Invalid("either --config or --scenario is required".into())),
    }
}

fn fail(e: &HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn cmd_run(args: &SpecArgs) -> ExitCode {
    let spec = match resolve_spec(args) {
        Ok(s) => s,
        Err(e) => return fail(&e.into()),
    };
    match run_to_dir(&spec, &args.out) {
        Ok(out) => {
            let s = &out.summary;
            println!(
                "{}: {:?} at t = {} after {} records, wrote {}",
                s.name,
                s.termination,
                s.t_final,
                s.records,
                args.out.display()
            );
            if s.termination == Termination::Nonfinite {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => fail(&e),
    }
}

fn cmd_sweep(args: &SpecArgs, axis: &str, values: &[f64], threads: usize) -> ExitCode {
    let spec = match resolve_spec(args) {
        Ok(s) => s,
        Err(e) => return fail(&e.into()),
    };
    match run_sweep(&spec, axis, values, threads, &args.out) {
        Ok(rows) => {
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            println!(
                "{} runs ({} failed), wrote {}",
                rows.len(),
                failed,
                Path::new(&args.out).join("sweep.csv").display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn cmd_verify() -> ExitCode {
    let outcomes = acceptance::run_all(|o| println!("{}", o.line()));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {} failed", outcomes.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    }
}

fn cmd_scenario(name: Option<&str>) -> ExitCode {
    match name {
        None => {
            for s in scenarios::all() {
                println!("{}", s.name);
            }
            ExitCode::SUCCESS
        }
        Some(n) => match scenarios::by_name(n) {
            Some(s) => {
                println!("{}", serde_json::to_string_pretty(&s).expect("scenario serializes"));
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: unknown scenario `{n}`");
                ExitCode::from(1)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep {
            spec,
            axis,
            values,
            threads,
        } => cmd_sweep(spec, axis, &values.0, *threads),
        Command::Verify => cmd_verify(),
        Command::Scenario { name } => cmd_scenario(name.as_deref()),
    }
}
