use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamperti-lab"))
        .args(args)
        .env_remove("LAMPERTI_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_string_lossy().into_owned()
}

#[test]
fn missing_hurst_index_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lab(&["--out", &out_arg(tmp.path()), "simulate", "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("H"), "{err}");
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn langevin_rejects_rough_drivers() {
    let tmp = tempfile::tempdir().unwrap();
    for h in ["0.4", "0.5"] {
        let out = lab(&["--out", &out_arg(tmp.path()), "langevin", "--H", h]);
        assert_eq!(out.status.code(), Some(2), "H = {h}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));
    }
    // bi driver: only the product HK matters
    let out = lab(&["--out", &out_arg(tmp.path()), "langevin", "--family", "bi", "--H", "0.9", "--K", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sub_family_rejects_k() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lab(&["--out", &out_arg(tmp.path()), "simulate", "--H", "0.4", "--K", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_bi_lamperti_variance_is_near_one() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sim");
    let out = lab(&[
        "--out", &out_arg(&dir), "simulate", "--family", "bi", "--H", "0.6", "--K", "0.7", "--alpha", "1.5",
        "--n", "512", "--M", "500",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&dir.join("manifest.json"));
    let summary = &m["summary"];
    assert_eq!(summary["target_variance"].as_f64().unwrap(), 1.0);
    assert!(summary["relative_deviation"].as_f64().unwrap().abs() < 0.15);
    let csv = std::fs::read_to_string(dir.join("trajectories.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("u,t,raw_0,lamperti_0"), "{header}");
    assert_eq!(csv.lines().count(), 513);
    assert_eq!(m["config"]["n"], 512);
    assert_eq!(m["ensemble"]["family"], "scaled_bi_fbm");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert!(m["wall_time_s"].as_f64().is_some());
}

#[test]
fn rates_single_case() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    let out = lab(&["--out", &out_arg(&dir), "rates", "--H", "0.7", "--K", "0.6", "--alpha", "1.5"]);
    assert!(out.status.success());
    let rows = json(&dir.join("rates.json"))["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 1);
    assert!((rows[0]["lambda_b"].as_f64().unwrap() - 0.87).abs() < 1e-12);
    assert!((rows[0]["lambda_s"].as_f64().unwrap() - 1.05).abs() < 1e-12);
    assert!(rows[0]["rel_err_b"].as_f64().unwrap().abs() < 0.05);
}

#[test]
fn rates_default_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    assert!(lab(&["--out", &out_arg(&dir), "rates"]).status.success());
    let rows = json(&dir.join("rates.json"))["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 17);
    let anchor = rows
        .iter()
        .find(|r| r["H"] == 0.6 && r["alpha"] == 3.0)
        .unwrap();
    assert!((anchor["lambda_s"].as_f64().unwrap() - 1.8).abs() < 1e-12);
    for r in &rows {
        assert!(r["rel_err_s"].as_f64().unwrap().abs() < 0.02);
    }
}

#[test]
fn ergodic_second_moment_target() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("e");
    let out = lab(&["--out", &out_arg(&dir), "ergodic", "--H", "0.6", "--alpha", "3", "--n", "2001", "--t-end", "20"]);
    assert!(out.status.success());
    let report = json(&dir.join("ergodic_report.json"));
    let m2 = report["time_avg_moments"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["k"] == 2)
        .unwrap();
    assert!((m2["target"].as_f64().unwrap() - 0.8513016).abs() < 1e-7);
    assert_eq!(report["ecf"].as_array().unwrap().len(), 81);
    let ecf = std::fs::read_to_string(dir.join("ecf.csv")).unwrap();
    assert_eq!(ecf.lines().next(), Some("k,re,im,theoretical"));
}

#[test]
fn acf_table_has_closed_form_column() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("a");
    let out = lab(&["--out", &out_arg(&dir), "acf", "--H", "0.3", "--alpha", "2", "--n", "256", "--M", "200", "--lag-max", "1"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("acf.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("lag,estimate,se,closed_form"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[3] - (2.0 - (-0.4f64).exp2())).abs() < 1e-12);
}

#[test]
fn langevin_oracle_check_passes_at_unit_alpha() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("l");
    let out = lab(&["--out", &out_arg(&dir), "langevin", "--H", "0.7", "--lags", "5", "--check-oracle"]);
    assert!(out.status.success());
    let report = json(&dir.join("langevin_report.json"));
    assert_eq!(report["oracle_check"]["passed"], true);
    let csv = std::fs::read_to_string(dir.join("langevin_acf.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,R(t)"));
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("s");
    let cfg = tmp.path().join("run.conf");
    std::fs::write(&cfg, "# small run\nH = 0.3\nalpha = 2\nn = 64\nM = 10 # paths\n").unwrap();
    let out = lab(&["--config", &out_arg(&cfg), "--out", &out_arg(&dir), "simulate", "--M", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&dir.join("manifest.json"));
    assert_eq!(m["config"]["H"], 0.3);
    assert_eq!(m["config"]["n"], 64);
    assert_eq!(m["config"]["M"], 20);
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.conf");
    std::fs::write(&cfg, "H = 0.3\nbogus = 1\n").unwrap();
    let out = lab(&["--config", &out_arg(&cfg), "--out", &out_arg(tmp.path()), "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn manifest_of_another_command_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    assert!(lab(&["--out", &out_arg(&dir), "rates", "--H", "0.3"]).status.success());
    let out = lab(&["--config", &out_arg(&dir.join("manifest.json")), "simulate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("plain");
    std::fs::write(&file, "").unwrap();
    let out = lab(&["--out", &out_arg(&file.join("sub")), "rates", "--H", "0.3"]);
    assert_eq!(out.status.code(), Some(4));
}
