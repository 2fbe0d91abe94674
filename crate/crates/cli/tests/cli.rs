use std::process::{Command, Output};

use serde_json::Value;

fn lapbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lapbc")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = lapbc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn code(args: &[&str]) -> i32 {
    lapbc(args).status.code().expect("exit code")
}

#[test]
fn line_is_bounded() {
    let v = json(&["inspect", "--graph", "line-Z", "--levels", "5"]);
    assert_eq!(v["verdict"], "bounded");
    assert_eq!(v["report"]["boundedness"]["sup"], 2.0);
    assert_eq!(v["report"]["vertices_per_level"], serde_json::json!([3, 5, 7, 9, 11]));
}

#[test]
fn fast_growing_tree_loses_mass() {
    let v = json(&["sc", "--graph", "radial-tree:d=2^n", "--t", "1.0", "--levels", "8"]);
    assert_eq!(v["verdict"], "incomplete");
    let delta = v["report"]["heat_mass"]["delta"].as_f64().unwrap();
    assert!(delta > 0.05 && delta < 0.07, "δ = {delta}");
    assert_eq!(v["report"]["degree_criterion"]["verdict"], "not-SC");
}

#[test]
fn regular_tree_keeps_mass() {
    let v = json(&["sc", "--graph", "regular-tree:k=3", "--levels", "12"]);
    assert_eq!(v["verdict"], "SC-infinity");
}

#[test]
fn example4_checks() {
    let v = json(&["example4", "--window", "50"]);
    assert_eq!(v["verdict"], "all-checks-pass");
    let lambda = v["report"]["lambda"].as_f64().unwrap();
    assert!((lambda - 1.5f64.acosh()).abs() < 1e-12);
    assert!((v["report"]["amp"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn example4_mass_converges() {
    // stiff truncations: the weighted degree grows geometrically
    let v = json(&["sc", "--graph", "example4", "--levels", "12"]);
    assert_eq!(v["verdict"], "SC-infinity");
    let levels = v["report"]["heat_mass"]["levels"].as_array().unwrap();
    let mass: Vec<f64> = levels.iter().map(|l| l["value"].as_f64().unwrap()).collect();
    assert!(mass.windows(2).all(|w| w[1] >= w[0]), "{mass:?}");
}

#[test]
fn output_is_reproducible() {
    let args = ["sc", "--graph", "fm-tree:k=3,q=0.5", "--levels", "6"];
    let a = lapbc(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_lapbc")).args(args).env("LAPBC_THREADS", "1").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_is_echoed() {
    let v = json(&["heat", "--graph", "line-Z", "--levels", "3", "--t", "0.5"]);
    assert_eq!(v["config"]["seed"], 0);
    assert_eq!(v["config"]["t"], 0.5);
    assert_eq!(v["config"]["levels"], 3);
    assert_eq!(v["tolerances"]["series_tail"], 1e-16);
}

#[test]
fn csv_rows_per_level() {
    let out = lapbc(&["heat", "--graph", "line-Z", "--levels", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "level,vertices,kernel,mass");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("3,7,"));
}

#[test]
fn writes_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = lapbc(&["inspect", "--graph", "line-Z", "--levels", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "inspect");
}

#[test]
fn graph_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path.json");
    let graph = serde_json::json!({
        "vertices": [{ "id": 0 }, { "id": 1 }, { "id": 2, "c": 1.5 }],
        "edges": [{ "u": 0, "v": 1, "b": 1.0 }, { "u": 1, "v": 2, "b": 2.0 }]
    });
    std::fs::write(&path, graph.to_string()).unwrap();
    let v = json(&["inspect", "--graph", path.to_str().unwrap(), "--root", "0", "--levels", "3"]);
    assert_eq!(v["report"]["finite"], true);
    assert_eq!(v["report"]["boundedness"]["sup"], 3.5);
}

#[test]
fn selftest_passes() {
    let v = json(&["selftest", "--levels", "2"]);
    assert_eq!(v["verdict"], "pass");
    assert!(v["report"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn exit_codes() {
    // parameters out of range
    assert_eq!(code(&["sc", "--graph", "line-Z", "--t", "-1"]), 2);
    assert_eq!(code(&["sc", "--graph", "line-Z", "--levels", "0"]), 2);
    assert_eq!(code(&["inspect", "--graph", "fm-tree"]), 2);
    assert_eq!(code(&["example4", "--rho", "1.5"]), 2);
    // inconclusive under --strict, fine otherwise
    assert_eq!(code(&["sc", "--graph", "line-Z", "--levels", "4", "--strict"]), 3);
    assert_eq!(code(&["sc", "--graph", "line-Z", "--levels", "4"]), 0);
    // usage
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["inspect"]), 64);
    assert_eq!(code(&["inspect", "--graph", "line-Z", "--format", "xml"]), 64);
    assert_eq!(code(&["--help"]), 0);
    // io
    assert_eq!(code(&["inspect", "--graph", "/nonexistent/graph.json"]), 74);
    assert_eq!(code(&["inspect", "--graph", "line-Z", "--out", "/nonexistent/dir/r.json"]), 74);
}
