use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dp2c_harness::runner::{parse_snapshot, SERIES_COLUMNS};
use serde_json::Value;

fn dp2c(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dp2c"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(p: &Path) -> String {
    p.display().to_string()
}

fn read_summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn zero_scenario_completes_with_zero_series() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("zero");
    let res = dp2c(&[
        "run",
        "--scenario",
        "zero",
        "--override",
        "diagnostics.snapshot_times=[0.0, 0.5]",
        "--out",
        &out_arg(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let summary = read_summary(&out);
    assert_eq!(summary["termination"], "completed");
    assert_eq!(summary["config"]["name"], "zero");
    assert_eq!(summary["t_final"], 1.0);
    assert_eq!(summary["boundary"]["decayed"], true);

    let csv = fs::read_to_string(out.join("series.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), SERIES_COLUMNS.join(","));
    let mut rows = 0;
    for line in lines {
        let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(vals.len(), 12);
        // every column but t and xi (the minimizer location) vanishes
        assert!(vals.iter().enumerate().all(|(i, &v)| i == 0 || i == 2 || v == 0.0), "{line}");
        rows += 1;
    }
    assert!(rows >= 2);

    let snap = fs::read(out.join("snapshot_001.bin")).unwrap();
    let (n, l, t, u, rho) = parse_snapshot(&snap).unwrap();
    assert_eq!((n, t), (64, 0.5));
    assert_eq!(l, std::f64::consts::PI);
    assert!(u.iter().chain(&rho).all(|&v| v == 0.0));
    assert!(out.join("snapshot_000.bin").exists());
}

#[test]
fn malformed_config_fails_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, "{ \"name\": \"x\", \"c\": 1.0, ").unwrap();
    let out = tmp.path().join("out");
    let res = dp2c(&["run", "--config", &out_arg(&cfg), "--out", &out_arg(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&res.stderr).is_empty());
    assert!(!out.exists());

    let res = dp2c(&[
        "run",
        "--scenario",
        "zero",
        "--override",
        "grid.n=100",
        "--out",
        &out_arg(&out),
    ]);
    assert_eq!(res.status.code(), Some(1));
    assert!(!out.join("series.csv").exists());
}

#[test]
fn missing_config_and_unwritable_output() {
    let tmp = tempfile::tempdir().unwrap();
    let res = dp2c(&["run", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(res.status.code(), Some(1));

    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let res = dp2c(&["run", "--scenario", "zero", "--out", &out_arg(&blocker.join("sub"))]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn config_file_round_trip_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let printed = dp2c(&["scenario", "smooth"]);
    assert!(printed.status.success());
    let cfg = tmp.path().join("smooth.json");
    fs::write(&cfg, &printed.stdout).unwrap();

    let mut csvs = Vec::new();
    for i in 0..2 {
        let out = tmp.path().join(format!("run{i}"));
        let res = dp2c(&[
            "run",
            "--config",
            &out_arg(&cfg),
            "--override",
            "grid.n=128",
            "--override",
            "t_max=0.3",
            "--out",
            &out_arg(&out),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        csvs.push(fs::read(out.join("series.csv")).unwrap());
        let summary = read_summary(&out);
        assert_eq!(summary["config"]["grid"]["n"], 128);
        assert!(summary["conservation"]["max_residual"].as_f64().unwrap() < 1e-4);
    }
    assert_eq!(csvs[0], csvs[1]);
}

fn sweep_rows(dir: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("value,termination,t_final"));
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn sweep_over_coupling_gives_one_row_per_value() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let res = dp2c(&[
        "sweep",
        "--scenario",
        "threshold_shallow",
        "--override",
        "grid.n=64",
        "--override",
        "t_max=0.5",
        "--axis",
        "c",
        "--values",
        "0,1,4",
        "--threads",
        "2",
        "--out",
        &out_arg(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = sweep_rows(&out);
    assert_eq!(rows.len(), 3);
    for (row, c) in rows.iter().zip([0.0, 1.0, 4.0]) {
        assert_eq!(row[0].parse::<f64>().unwrap(), c);
        assert_eq!(row[1], "completed");
    }
    for i in 0..3 {
        let s = read_summary(&out.join(format!("run_{i:03}")));
        assert_eq!(s["config"]["c"].as_f64().unwrap(), [0.0, 1.0, 4.0][i]);
    }
}

#[test]
fn empty_sweep_writes_empty_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let res = dp2c(&["sweep", "--scenario", "zero", "--axis", "c", "--values", "", "--out", &out_arg(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(sweep_rows(&out).is_empty());
}

#[test]
fn sweep_rejects_non_numeric_axis() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let res = dp2c(&["sweep", "--scenario", "zero", "--axis", "name", "--values", "1", "--out", &out_arg(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn blowup_time_does_not_increase_with_amplitude() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sine.json");
    let spec = serde_json::json!({
        "name": "sine_blowup",
        "initial_data": { "kind": "thm52_family", "u_sin": [-6.0], "rho_cos": [0.5] },
        "c": 1.0,
        "grid": { "n": 1024, "half_length": std::f64::consts::PI / 20.0 },
        "t_max": 0.05
    });
    fs::write(&cfg, spec.to_string()).unwrap();
    let out = tmp.path().join("sweep");
    let res = dp2c(&[
        "sweep",
        "--config",
        &out_arg(&cfg),
        "--axis",
        "initial_data.u_sin.0",
        "--values",
        "-6,-8,-10",
        "--out",
        &out_arg(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = sweep_rows(&out);
    let times: Vec<f64> = rows
        .iter()
        .map(|r| {
            assert_eq!(r[1], "blowup_detected", "{r:?}");
            r[2].parse().unwrap()
        })
        .collect();
    assert!(times.windows(2).all(|w| w[1] <= w[0]), "{times:?}");
}

#[test]
fn scenario_listing() {
    let res = dp2c(&["scenario"]);
    assert!(res.status.success());
    let names = String::from_utf8(res.stdout).unwrap();
    for n in ["zero", "smooth", "ramp_blowup", "peakon"] {
        assert!(names.lines().any(|l| l == n));
    }
    assert_eq!(dp2c(&["scenario", "nope"]).status.code(), Some(1));
    assert_eq!(dp2c(&["frobnicate"]).status.code(), Some(1));
}
