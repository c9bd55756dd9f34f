//! End-to-end binary tests: exit codes, diagnostics and table contents.

use std::path::PathBuf;
use std::process::{Command, Output};

fn rtq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn minimal_gw_config_yields_closed_form_row() {
    let path = configs_dir().join("gw_passive_minimal.json");
    let out = rtq(&["gw", "--config", path.to_str().unwrap(), "--compare"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.ends_with("eta_closed,eta_general,abs_diff"));
    let row = lines.next().unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    // 9 report fields + 3 compare fields
    assert_eq!(cols.len(), 12);
    let eta: f64 = cols[7].parse().unwrap();
    let xi: f64 = cols[2].parse().unwrap();
    assert!((eta - (1.0 - xi / 3.0)).abs() < 1e-3, "eta = {eta}");
    let abs_diff: f64 = cols[11].parse().unwrap();
    assert!(abs_diff <= 1e-3);
    // exactly one data row without a sweep
    assert!(lines.next().unwrap().starts_with('#'));
}

#[test]
fn gw_sweep_converges_and_grows_quadratically() {
    let path = configs_dir().join("gw_tau_sweep.json");
    let out = rtq(&["gw", "--config", path.to_str().unwrap(), "--compare"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|&(i, _)| i != 1 && i != 9)
                .map(|(_, v)| v.parse::<f64>().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(rows.len(), 50);
    // abs_diff column stays within the convergence bound on every row
    for row in &rows {
        assert!(*row.last().unwrap() <= 1e-3);
    }
    // energy column grows as tau^2: compare the first and last points
    let (tau0, de0) = (rows[0][0], rows[0][5]);
    let (tau1, de1) = (rows[49][0], rows[49][5]);
    let ratio = de1 / de0;
    let expected = (tau1 / tau0).powi(2);
    assert!(
        (ratio / expected - 1.0).abs() < 1e-6,
        "ratio {ratio} vs tau^2 {expected}"
    );
}

#[test]
fn overlapping_partition_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "bad.json",
        r#"{"kind":"efficiency","state_family":"passive",
            "partition":{"system":[1,2],"environment":[2,3]},
            "series":{"seed":1,"h":1e-4}}"#,
    );
    let out = rtq(&["efficiency", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("partition"), "stderr: {err}");
}

#[test]
fn unknown_schema_field_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "unknown.json",
        "{\n  \"kind\": \"gw\",\n  \"mystery\": 1\n}",
    );
    let out = rtq(&["gw", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("mystery") && err.contains("line"), "stderr: {err}");
}

#[test]
fn zero_series_scenario_exits_3_no_energy_transfer() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "zero.json",
        r#"{"kind":"gw","state_family":"passive",
            "gw":{"epsilon":1e-4,"tau":0.0,"pair":[1,2],
                  "temperature_nK":10.0,"length_um":1.0,"sound_speed_mps":0.01}}"#,
    );
    let out = rtq(&["gw", "--config", path.to_str().unwrap(), "--compare"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("NoEnergyTransfer"), "stderr: {err}");
}

#[test]
fn tms_hierarchy_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "hier.json",
        r#"{"kind":"efficiency","state_family":"tms","modes":4,
            "partition":{"system":[1,2],"environment":[3,4]},
            "squeeze":{"r":1e-4,"theta":0.0},
            "series":{"seed":1,"h":1e-5}}"#,
    );
    let out = rtq(&["efficiency", "--config", path.to_str().unwrap(), "--compare"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("PerturbativeHierarchyViolated"), "stderr: {err}");
}

#[test]
fn kind_mismatch_exits_2() {
    let path = configs_dir().join("gw_passive_minimal.json");
    let out = rtq(&["battery", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_check_rows_stay_within_tolerance() {
    let path = configs_dir().join("oracle_check_tms.json");
    let out = rtq(&["oracle-check", "--config", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
        let abs_diff: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!(abs_diff <= 1e-6, "row out of tolerance: {line}");
    }
}
