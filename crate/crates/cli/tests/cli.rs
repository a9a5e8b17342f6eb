use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_median-hardy"))
        .args(args)
        .env("MH_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = bin(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn check<'a>(report: &'a Value, kind: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["kind"] == kind)
        .unwrap_or_else(|| panic!("no {kind} check"))
}

#[test]
fn two_term_input_is_tight_at_second_prefix() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "s.json", "[0, 1]");
    let (code, r) = json(&["verify-discrete", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["schema"], 1);
    let c = check(&r, "prefix_bound");
    assert_eq!(c["holds"], true);
    assert_eq!(c["lhs"], "1/2");
    assert_eq!(c["rhs"], "1/2");
    assert_eq!(c["location"]["prefix"], 2);
    assert_eq!(r["aggregate"]["violations"], 0);
    assert_eq!(r["aggregate"]["checks_run"], 9);
}

#[test]
fn random_discrete_trials_pass() {
    let (code, r) = json(&["verify-discrete", "--p", "1.5", "--trials", "200", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(r["config"]["backend"], "float");
    assert_eq!(r["aggregate"]["checks_run"], 1800);
    assert!(r["aggregate"]["max_ratio"].as_f64().unwrap() < 3.675);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.txt", "");
    let bad = write(&dir, "bad.json", "[1, -2]");
    let garbage = write(&dir, "g.json", "[1, \"x\"]");
    for args in [
        vec!["verify-discrete", "--p", "1"],
        vec!["verify-discrete", "--p", "2.5", "--backend", "exact"],
        vec!["verify-discrete", "--trials", "0"],
        vec!["eval", "--input", empty.to_str().unwrap()],
        vec!["verify-discrete", "--input", bad.to_str().unwrap()],
        vec!["verify-discrete", "--input", garbage.to_str().unwrap()],
        vec!["verify-discrete", "--input", "/nonexistent/file.json"],
        vec!["eval"],
        vec!["frobnicate"],
    ] {
        assert_eq!(bin(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_median-hardy"))
        .args(["verify-discrete", "--trials", "1"])
        .env("MH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

const F1: &str = r#"{"segments": [{"len": 1, "val": 0}, {"len": 1, "val": 1}]}"#;

#[test]
fn continuous_f1_report() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "f1.json", F1);
    let (code, r) = json(&["verify-continuous", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let t = check(&r, "theorem1");
    assert!((t["lhs"].as_f64().unwrap() - 0.6137056388801094).abs() < 1e-9);
    assert_eq!(t["rhs"].as_f64().unwrap(), 2.0);
    assert_eq!(check(&r, "lemma1")["ratio"], "1");
}

#[test]
fn zero_function_holds_trivially() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "z.json", r#"{"segments": [{"len": 3, "val": 0}]}"#);
    let (code, r) = json(&["verify-continuous", "--input", path.to_str().unwrap(), "--p", "3"]);
    assert_eq!(code, 0);
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["holds"], true);
    }
}

#[test]
fn random_continuous_trials_pass() {
    for p in ["1.5", "2", "3"] {
        let (code, r) = json(&["verify-continuous", "--p", p, "--trials", "30"]);
        assert_eq!(code, 0, "p = {p}");
        assert_eq!(r["aggregate"]["violations"], 0);
    }
}

#[test]
fn sharpness_curve_and_fit() {
    let (code, r) = json(&["sharpness", "--p", "2"]);
    assert_eq!(code, 0);
    let curve = r["data"]["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 6);
    let last = curve[5]["ratio"].as_f64().unwrap();
    assert!((last - 1.617427637821491).abs() < 1e-9);
    let limit = r["data"]["extrapolation"]["limit"].as_f64().unwrap();
    assert!((limit - 2.0).abs() < 0.2);
}

#[test]
fn sharpness_single_block() {
    let out = bin(&["sharpness", "--n-grid", "1", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "N,lhs,rhs,ratio\n1,0.25,1.0,0.25\n"
    );
}

#[test]
fn eval_discrete_table() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "s.txt", "0\n1\n0\n0.5\n");
    let out = bin(&["eval", "--input", path.to_str().unwrap(), "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "i,mean,lower_median,top_half_sum\n1,0,0,0\n2,1/2,0,1\n3,1/3,0,1\n4,3/8,0,3/2\n"
    );
}

#[test]
fn eval_continuous_tables() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "f1.json", F1);
    let (code, r) = json(&["eval", "--family", "continuous", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let median = r["data"]["median"].as_array().unwrap();
    assert_eq!(median.len(), 1);
    assert_eq!(median[0]["value"], "0");
    assert_eq!(median[0]["to"], "inf");
    let avg = r["data"]["average"].as_array().unwrap();
    assert_eq!(avg.len(), 3);
    assert_eq!(avg[1]["alpha"], "-1");
    assert_eq!(avg[1]["beta"], "1");
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("report.json");
    let out = bin(&[
        "verify-discrete",
        "--trials",
        "5",
        "--output",
        "json",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["config"]["trials"], 5);
    assert!(v.get("timing").is_none());
}
