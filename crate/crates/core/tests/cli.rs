use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const GEO: [&str; 10] = ["--model", "geo", "--N", "2", "--a", "0.5,0.6", "--c1", "0.3", "--c2", "0.4"];

fn stripstat(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stripstat"));
    cmd.args(args).env_remove("STRIPSTAT_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("STRIPSTAT_OUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn partition_writes_one_csv_row() {
    let o = stripstat(&with(&["partition"], &GEO), None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data, ["model,N,Z", "geo,2,3.6928355190833484"]);
    assert!(text.starts_with("# stripstat "));
    assert!(text.contains("\"c1\":0.3"));
}

#[test]
fn unreachable_tolerance_exits_three() {
    let o = stripstat(&["verify", "--suite", "all", "--tol", "1e-30"], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_width_exits_two() {
    let o = stripstat(&["laplace", "--model", "geo", "--a", "0.5", "--c1", "0.3", "--c2", "0.4", "--points", "1", "--t", "0.5"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--N"));
}

#[test]
fn violated_invariant_is_named() {
    let o = stripstat(&["partition", "--model", "geo", "--N", "1", "--a", "0.5", "--c1", "2.5", "--c2", "0.4"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("a*c"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"schema": 1, "model": "geo", "N": 2, "a": [0.5], "c1": 0.3, "c2": 0.4, "seed": 5}"#).unwrap();
    let o = stripstat(&["partition", "--config", cfg.to_str().unwrap(), "--seed", "9", "--c2", "0.2", "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["config"]["seed"], 9);
    assert_eq!(doc["config"]["c2"], 0.2);
    assert_eq!(doc["config"]["c1"], 0.3);
    assert_eq!(doc["config"]["schema"], 1);
    assert!(doc["version"].is_string());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"modle": "geo"}"#).unwrap();
    let o = stripstat(&["partition", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_directory_from_environment_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--model", "geo", "--N", "2", "--a", "0.5", "--c1", "0.3", "--c2", "0.4", "--m", "2", "--samples", "2000", "--seed", "11"];
    let o = stripstat(&args, Some(dir.path()));
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read(dir.path().join("simulate.json")).unwrap();
    let again = tempfile::tempdir().unwrap();
    stripstat(&args, Some(again.path()));
    assert_eq!(first, std::fs::read(again.path().join("simulate.json")).unwrap());
    let doc: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(doc["result"]["coordinates"].as_array().unwrap().len(), 2);
    assert_eq!(doc["result"]["m"], 2);
}

#[test]
fn kpz_lists_give_a_scan() {
    let o = stripstat(&["kpz", "--u", "-0.5,1", "--v", "1", "--L", "10,100"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "u,v,L,c_uv,phase_limit,gap");
    assert_eq!(data.len(), 5);
}

#[test]
fn verify_reports_checks() {
    let o = stripstat(&["verify", "--suite", "schur", "--format", "csv"], None);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().filter(|l| l.starts_with("PASS")).count(), 7);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("criterion,name,measured,limit,relation,passed"));
}

#[test]
fn explicit_out_path_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/sample.csv");
    let mut args = with(&["sample", "--samples", "3", "--out"], &GEO);
    args.insert(4, out.to_str().unwrap());
    let o = stripstat(&args, None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3 * 3);
}
