use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fwlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fwlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("FWLAB_TOL_ODD_TOL")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eriksen_series_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = fwlab(&["eriksen-series"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("eriksen_series.json"));
    assert_eq!(report["pass"], true);
    assert_eq!(
        report["result"]["diff"]["entries"]
            .as_array()
            .unwrap()
            .len(),
        0
    );
    assert_eq!(report["config_sha256"].as_str().unwrap().len(), 64);
    assert!(dir.path().join("eriksen_series.txt").exists());
}

#[test]
fn eriksen_series_low_weight_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        fwlab(&["eriksen-series", "--weight-max", "2"], dir.path())
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn perturbed_a24_is_reported_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = fwlab(&["eriksen-series", "--perturb-a24"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let report = read_json(&dir.path().join("eriksen_series.json"));
    assert_eq!(
        report["result"]["injected"]["diff_is_injected_pattern"],
        true
    );
    assert_eq!(report["result"]["injected"]["label"], "a24.o2_oe_sq");
    assert!(!report["result"]["diff"]["entries"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn reports_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(fwlab(&["relfw-check"], d.path()).status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("relfw_check.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn relfw_check_reports_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fwlab(&["relfw-check"], dir.path()).status.code(), Some(0));
    let report = read_json(&dir.path().join("relfw_check.json"));
    let f: Vec<&str> = report["result"]["f"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(f, ["1", "1/2", "-1/8", "1/16", "-5/128"]);
    let g: Vec<&str> = report["result"]["g"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(g, ["-1/16", "3/64", "-5/128"]);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"weight_max": 4, "weight": 2}"#).unwrap();
    let out = fwlab(
        &["eriksen-series", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));
}

#[test]
fn out_of_range_weight_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        fwlab(&["eriksen-series", "--weight-max", "11"], dir.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn numeric_fw_sweep_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"lattice": {"sites": 32, "box_length": 32.0, "mass": 1.0,
            "potential": {"kind": "cosine", "amplitude": 0.3, "periods": 1}},
            "hbar": [0.4, 0.2, 0.1, 0.05], "min_slope": 1.5, "random_checks": 4}"#,
    )
    .unwrap();
    let out = fwlab(
        &[
            "numeric-fw",
            "--config",
            cfg.to_str().unwrap(),
            "--export-matrices",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report = read_json(&dir.path().join("numeric_fw.json"));
    assert_eq!(
        report["result"]["study"]["debroglie_ratio"]
            .as_array()
            .unwrap()
            .len(),
        4
    );
    let m = read_json(&dir.path().join("numeric_fw_h_fw.json"));
    assert_eq!(m["rows"], 64);
    assert_eq!(m["data"].as_array().unwrap().len(), 64 * 64);
}

#[test]
fn short_sweep_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fwlab(&["numeric-fw", "--hbar", "0.2,0.1,0.05"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tolerance_env_override_causes_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fwlab"))
        .args(["numeric-fw", "--hbar", "0.4,0.2,0.1,0.05", "--out"])
        .arg(dir.path())
        .env("FWLAB_TOL_ODD_TOL", "1e-30")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_tolerance_env_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fwlab"))
        .args(["numeric-fw", "--out"])
        .arg(dir.path())
        .env("FWLAB_TOL_MASS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn spin1_landau_run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = fwlab(&["spin1-spectrum", "--n-max", "20"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("spin1_spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,lambda,E_num,E_analytic,residual"));
    assert_eq!(lines.count(), 10);
    let report = read_json(&dir.path().join("spin1_spectrum.json"));
    assert!(
        report["result"]["report"]["max_relative_residual"]
            .as_f64()
            .unwrap()
            <= 1e-8
    );
}

#[test]
fn spin1_tolerance_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"spec": {"mass": 1.0, "charge": 1.0, "g_factor": 2.5, "field": 0.02, "hbar": 1.0, "n_max": 20},
            "max_residual": 1e-9}"#,
    )
    .unwrap();
    let out = fwlab(
        &["spin1-spectrum", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spin1_truncation_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        fwlab(&["spin1-spectrum", "--n-max", "6"], dir.path())
            .status
            .code(),
        Some(1)
    );
}
