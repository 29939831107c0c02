use std::process::Command;

use chaoscope::cli::replay_report;
use chaoscope::{Report, ScanConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chaoscope"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn list_text_json_and_filter() {
    let (code, out, _) = run(&["list"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("sin_ax")));
    let (_, out, _) = run(&["list", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"sin_ax") && ids.contains(&"logistic_357"));
    let (_, out, _) = run(&["list", "--kind", "continuous", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v.as_array().unwrap().iter().all(|e| e["kind"] == "continuous"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["classify", "nope", "--range", "0:1"]).0, 1);
    assert_eq!(run(&["classify", "linear_ax"]).0, 1, "unbounded Θ needs --range");
    assert_eq!(run(&["classify", "linear_ax", "--range", "1:0"]).0, 1);
    assert_eq!(run(&["taxonomy", "log_sine"]).0, 1, "needs --alpha or --family");
    assert_eq!(run(&["discrete", "sin_drift_commensurable", "tail", "--x", "0.5", "--y", "1/3"]).0, 1);
    assert_eq!(run(&["windows", "bad", "--expr", "sqrt(x - a)", "--alpha", "1", "--beta", "2", "--range", "0:2"]).0, 2);
    let (code, out, _) = run(&["classify", "linear_ax", "--range", "-10:10"]);
    assert_eq!(code, 0);
    let r = Report::from_bytes(out.as_bytes()).unwrap();
    assert_eq!(r.result["label"], "sensitive_only");
}

#[test]
fn report_has_schema_keys_and_17_digit_floats() {
    let (code, out, _) = run(&["taxonomy", "log_sine", "--alpha", "1/2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    for k in ["tool_version", "family", "config", "command", "result", "evidence", "warnings"] {
        assert!(keys.iter().any(|x| *x == k), "missing {k}");
    }
    assert_eq!(keys.len(), 7);
    assert!(out.contains("\"eps_top\": 5.0000000000000000e-1"));
    assert_eq!(v["result"]["label"], "smooth_sensitive");
}

#[test]
fn config_file_mirrors_field_names() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let c = ScanConfig { grid_points: 4000, seed: 11, ..ScanConfig::default() };
    std::fs::write(&cfg, serde_json::to_string(&c).unwrap()).unwrap();
    let (code, out, err) = run(&["windows", "sin_ax", "--alpha", "1", "--beta", "1.5", "--range", "0:30", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let r = Report::from_bytes(out.as_bytes()).unwrap();
    assert_eq!(r.config, c);
    std::fs::write(&cfg, r#"{"grid_point": 10}"#).unwrap();
    assert_eq!(run(&["list", "--config", cfg.to_str().unwrap()]).0, 0, "list ignores config");
    assert_eq!(run(&["classify", "linear_ax", "--range", "0:1", "--config", cfg.to_str().unwrap()]).0, 1);
}

#[test]
fn plot_data_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"grid_points": 500}"#).unwrap();
    let (code, _, err) = run(&[
        "windows", "sin_ax", "--alpha", "1", "--beta", "2", "--range", "0:6", "--plot-data",
        csv.to_str().unwrap(), "--config", cfg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,psi_alpha,psi_beta,abs_d"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 500);
    for r in &rows {
        assert!((r[1] - r[0].sin()).abs() < 1e-15);
        assert!((r[3] - (r[1] - r[2]).abs()).abs() < 1e-15);
    }
}

#[test]
fn out_file_replays_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, out, _) = run(&[
        "windows", "log_sine", "--alpha", "0.3", "--beta", "0.7", "--range", "0.01:1", "--kind", "disjoint", "--eps",
        "0.125", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("disjoint windows"));
    let replay = replay_report(&path).unwrap();
    assert!(replay.identical);
}

#[test]
fn user_family_with_domains() {
    let (code, out, err) = run(&[
        "taxonomy", "sq", "--expr", "a*x^2", "--omega", "0:2", "--theta", "-1:1", "--alpha", "1",
    ]);
    assert_eq!(code, 0, "{err}");
    let r = Report::from_bytes(out.as_bytes()).unwrap();
    assert_eq!(r.family["id"], "sq");
    assert_eq!(r.result["label"], "insensitive");
    assert_eq!(run(&["classify", "sin_ax", "--expr", "x", "--range", "0:1"]).0, 1, "built-in ids are reserved");
}
