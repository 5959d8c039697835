//! End-to-end tests of the command-line binary: every documented invocation,
//! output formats, config precedence, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kitaev-mpe"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Last data row of a CSV table, split into fields.
fn last_row(csv: &str) -> Vec<String> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .last()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect()
}

fn num(field: &str) -> f64 {
    field.parse().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("kitaev-mpe-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn qfi_nearest_neighbor_saturates() {
    let out = run(&[
        "qfi", "--J", "1", "--mu", "0", "--delta", "1", "--alpha", "1000", "--L", "100",
        "--operator", "x",
    ]);
    assert!(out.status.success());
    let row = last_row(&stdout(&out));
    // operator, fisher_density, fisher, witnessed_depth, genuine
    assert_eq!(row[0], "x");
    assert!((num(&row[1]) - 100.0).abs() < 1e-8);
    assert_eq!(row[3], "100");
    assert_eq!(row[4], "1");
}

#[test]
fn fit_long_range_critical_line() {
    let out = run(&[
        "fit", "--J", "1", "--mu", "-1", "--delta", "1", "--alpha", "0.5", "--sizes",
        "64,96,128,192,256,384,512", "--operator", "best",
    ]);
    assert!(out.status.success());
    let row = last_row(&stdout(&out));
    let (b, c) = (num(&row[0]), num(&row[1]));
    // smoke-level bounds; the tight tolerances live in the acceptance suite
    assert!((b - 0.75).abs() < 0.03, "b = {b}");
    assert!((c - 1.05).abs() < 0.15, "c = {c}");
}

#[test]
fn winding_half_integer() {
    let out = run(&["winding", "--J", "1", "--mu", "2", "--delta", "1", "--alpha", "0.5"]);
    assert!(out.status.success());
    let row = last_row(&stdout(&out));
    assert_eq!(num(&row[1]), -0.5, "snapped winding");
}

#[test]
fn alpha_inf_equals_sentinel() {
    let a = run(&["spectrum", "--alpha", "inf", "--L", "10"]);
    let b = run(&["spectrum", "--alpha", "1000", "--L", "10"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn susceptibility_reports_three_channels() {
    let out = run(&["susceptibility", "--mu", "1", "--alpha", "2", "--L", "200"]);
    assert!(out.status.success());
    let row = last_row(&stdout(&out));
    assert!(num(&row[0]) > 0.0 && num(&row[1]) > 0.0 && num(&row[2]) > 0.0);
}

#[test]
fn collapse_with_pinned_exponent() {
    let out = run(&[
        "collapse", "--mu", "-1", "--alpha", "0.5", "--operator", "x", "--b", "0.751", "--sizes",
        "100,200,400",
    ]);
    assert!(out.status.success());
    let row = last_row(&stdout(&out));
    assert!(num(&row[1]) < 0.05, "deviation {}", row[1]);
}

#[test]
fn oracle_check_small_chain() {
    let out = run(&["oracle-check", "--L", "8", "--draws", "5"]);
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.ends_with(",ok")).count(), 5);
}

#[test]
fn sweep_deterministic_across_worker_counts() {
    let args = [
        "sweep", "--axis1", "mu:-2:2:5", "--axis2", "alpha:0:4:5", "--observable", "gap", "--L",
        "64",
    ];
    let strip = |s: &str| {
        s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
    };
    let a = run(&[&args[..], &["--workers", "1"]].concat());
    let b = run(&[&args[..], &["--workers", "8"]].concat());
    assert!(a.status.success() && b.status.success());
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&b)));
    // KITAEV_MPE_WORKERS is the fallback for --workers
    let c = bin().args(args).env("KITAEV_MPE_WORKERS", "3").output().unwrap();
    assert!(c.status.success());
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&c)));
    // 5×5 grid in row-major order
    let text = stdout(&a);
    let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r.ends_with(",ok")));
}

#[test]
fn sweep_json_format() {
    let out = run(&[
        "sweep", "--axis1", "mu:0:1:2", "--axis2", "delta:0.5:1:2", "--observable", "chi_mu",
        "--L", "32", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert!(v["rows"][0][2].is_f64());
}

#[test]
fn csv_round_trip_is_lossless() {
    let out = run(&["spectrum", "--mu", "0.7", "--alpha", "1.3", "--L", "16"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let table = kitaev_mpe::output::parse_csv(&text).unwrap();
    assert_eq!(table.to_csv(), text);
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("winding.csv");
    let _ = std::fs::remove_file(&path);
    let out = run(&["winding", "--mu", "0", "--alpha", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(num(&last_row(&text)[1]).abs(), 1.0);
}

#[test]
fn config_file_provides_defaults_flags_override() {
    let path = scratch("run.conf");
    std::fs::write(&path, "mu = 2\nalpha = 0.5  # long-range\nL = 64\n").unwrap();
    let cfg = path.to_str().unwrap();
    let from_config = run(&["qfi", "--config", cfg, "--operator", "x"]);
    let explicit = run(&["qfi", "--mu", "2", "--alpha", "0.5", "--L", "64", "--operator", "x"]);
    assert!(from_config.status.success());
    assert_eq!(stdout(&from_config), stdout(&explicit));
    // a flag beats the config value
    let overridden = run(&["qfi", "--config", cfg, "--mu", "0", "--operator", "x"]);
    let explicit0 = run(&["qfi", "--mu", "0", "--alpha", "0.5", "--L", "64", "--operator", "x"]);
    assert_eq!(stdout(&overridden), stdout(&explicit0));
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(run(&["qfi", "--L", "101"]).status.code(), Some(1), "odd L");
    assert_eq!(run(&["qfi", "--bogus-flag"]).status.code(), Some(1), "unknown flag");
    assert_eq!(run(&["fit", "--sizes", "64,96"]).status.code(), Some(1), "too few sizes");
    assert_eq!(
        run(&["sweep", "--axis1", "mu:0:0:5", "--axis2", "alpha:0:1:2", "--observable", "gap"])
            .status
            .code(),
        Some(1),
        "degenerate axis"
    );
    assert_eq!(
        run(&["sweep", "--axis1", "mu:0:1:2", "--axis2", "alpha:0:1:2", "--observable", "b"])
            .status
            .code(),
        Some(1),
        "b observable without sizes"
    );
}

#[test]
fn numerical_failures_exit_two_with_flagged_rows() {
    // the alpha axis dips below zero: those grid points fail but the sweep
    // completes with status-flagged rows and exit code 2
    let out = run(&[
        "sweep", "--axis1", "mu:0:1:2", "--axis2", "alpha:-1:1:2", "--observable", "gap", "--L",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().any(|r| r.ends_with(",ok")));
    assert!(rows.iter().any(|r| !r.ends_with(",ok")), "failed rows must be flagged");
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["qfi", "--help"]).status.code(), Some(0));
}
