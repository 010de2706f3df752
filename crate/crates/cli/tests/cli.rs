use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn normext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normext")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("normext-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_shifted_real() {
    let m = model("shifted_real.json");
    let out = normext(&["classify", "--model", m.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    let c = &r["data"]["classification"];
    assert_eq!(c["verdict"], "line_family");
    assert_eq!(c["t"], "inf");
    assert_eq!(c["s"], -1.0);
    assert_eq!(c["family"]["description"], "a - i");
}

#[test]
fn classify_line_model() {
    let m = model("line_t2_s3.json");
    let r = json(&normext(&["classify", "--model", m.to_str().unwrap()]));
    let c = &r["data"]["classification"];
    assert_eq!(c["t"], 2.0);
    assert_eq!(c["s"], 3.0);
}

#[test]
fn eps_gap_violation_is_an_input_error() {
    let m = model("eps_gap.json");
    let out = normext(&["validate", "--model", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "EpsGapViolated");
}

#[test]
fn malformed_model_is_an_input_error() {
    let p = tmp("bad.json");
    std::fs::write(&p, "{ not json").unwrap();
    let out = normext(&["validate", "--model", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "ParseError");
}

#[test]
fn green_check_is_byte_reproducible() {
    let m = model("shifted_real.json");
    let args = ["green-check", "--model", m.to_str().unwrap(), "--seed", "42", "--pairs", "50"];
    let a = normext(&args);
    let b = normext(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let seq = normext(&[&args[..], &["--sequential"]].concat());
    assert_eq!(a.stdout, seq.stdout);
}

#[test]
fn assert_flag_sets_exit_status() {
    let m = model("shifted_real.json");
    let ok = normext(&["check-subspace", "--model", m.to_str().unwrap(), "--assert"]);
    assert_eq!(ok.status.code(), Some(0));

    let sub = tmp("not_normal.json");
    std::fs::write(&sub, r#"[{"u": [1], "v": [1]}]"#).unwrap();
    let bad = normext(&["check-subspace", "--model", m.to_str().unwrap(), "--subspace", sub.to_str().unwrap(), "--assert"]);
    assert_eq!(bad.status.code(), Some(1));
    let soft = normext(&["check-subspace", "--model", m.to_str().unwrap(), "--subspace", sub.to_str().unwrap()]);
    assert_eq!(soft.status.code(), Some(0));
    assert!(!json(&soft)["verdicts"].as_array().unwrap().iter().all(|v| v["passed"] == true));
}

#[test]
fn figure_is_deterministic() {
    let m = model("line_t2_s3.json");
    let (a, b) = (tmp("a.svg"), tmp("b.svg"));
    for p in [&a, &b] {
        let out = normext(&["classify", "--model", m.to_str().unwrap(), "--figure", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let svg = std::fs::read_to_string(&a).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("x - 2y = 3"));
    assert_eq!(svg, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn report_round_trips_and_passes() {
    let m = model("shifted_real.json");
    let out_path = tmp("report.json");
    let out = normext(&[
        "report",
        "--model",
        m.to_str().unwrap(),
        "--grid",
        "500",
        "--terms",
        "4096",
        "--out",
        out_path.to_str().unwrap(),
        "--assert",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let r = normext_cli::report::RunReport::from_json(&text).unwrap();
    assert_eq!(r.to_json(), text);
    assert_eq!(r.command, "report");
    assert_eq!(r.seed, 42);
    assert!(r.timings.is_none());
    for key in ["growth", "green", "classification", "oracle_scan", "witness"] {
        assert!(r.data.contains_key(key), "missing {key}");
    }
}

#[test]
fn timings_only_when_requested() {
    let m = model("shifted_real.json");
    let r = json(&normext(&["validate", "--model", m.to_str().unwrap(), "--timings"]));
    assert!(r["timings"].is_array());
}
