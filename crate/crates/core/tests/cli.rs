//! End-to-end checks of the command-line surface: exit codes, config
//! ingestion, CSV output files, and report determinism.

use spoofrelay::harness::{p_s_for_gamma0_db, CSV_HEADER};
use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spoofrelay"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &tempfile::TempDir, name: &str, d_se_m: f64, pe_over_ps_db: f64) -> String {
    let ps_db = 10.0 * p_s_for_gamma0_db(10.0).log10();
    let text = format!(
        "d_sd_m = 1000\nd_se_m = {d_se_m}\nfreq_hz = 1.8e9\nm_rx = 1\nn_tx = 2\nps_db = {ps_db:.12}\npe_db = {:.12}\n",
        ps_db + pe_over_ps_db
    );
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_reports_the_reference_split() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "near.conf", 400.0, 10.0);
    let out = run(&["solve", &cfg, "--json"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mode"], "constructive_relay");
    let rho = v["rho_star"][0].as_f64().unwrap();
    assert!((rho - 0.42).abs() <= 1e-6, "rho = {rho}");
    let rate = v["rate_bps_hz"].as_f64().unwrap();
    assert!((rate - 37.25_f64.log2()).abs() <= 1e-6);
}

#[test]
fn solve_exit_code_distinguishes_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "far.conf", 2800.0, -15.0);
    let out = run(&["solve", &cfg]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();

    let out = run(&["solve", dir.path().join("missing.conf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "d_sd_m = 1000\nbogus_key = 3\n").unwrap();
    let out = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));

    let out = run(&["--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["sweep", "fig9"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn sweep_writes_csv_with_monotone_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("fig3.csv");
    let out = run(&["sweep", "fig3", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let alphas: Vec<f64> = lines
        .map(|l| l.split(',').next().unwrap().parse::<f64>().unwrap())
        .collect();
    assert_eq!(alphas.len(), 200);
    for w in alphas.windows(2) {
        assert!(w[1] > w[0], "alpha column must be strictly increasing");
    }
}

#[test]
fn custom_sweep_takes_axis_and_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "base.conf", 2800.0, 0.0);
    let out = run(&[
        "sweep", "custom", "--config", &cfg, "--axis", "pe_over_ps_db", "--points", "-5,0,5",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4); // header + 3 rows

    // custom without the required flags is a usage error
    let out = run(&["sweep", "custom", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_green() {
    let args = ["verify", "--seed", "7", "--grid", "2000", "--instances", "8"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0), "stdout: {}", String::from_utf8_lossy(&first.stdout));
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&first.stdout).contains("PASS"));
}

#[test]
fn baselines_prints_both_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "near.conf", 400.0, 0.0);
    let out = run(&["baselines", &cfg, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let passive = v["passive"]["rate_bps_hz"].as_f64().unwrap();
    assert!((passive - 11.0_f64.log2()).abs() <= 1e-9);
    assert!(v["jamming_only"]["rate_bps_hz"].as_f64().unwrap() >= passive);
}
