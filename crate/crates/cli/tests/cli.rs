use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const M37: &str = r#"{"l": 3, "n": 7, "entries": [
    ["z1", "z2", "z3", "-z3"],
    ["z2", "-z1", "z3", "z3"],
    ["z3", "z3", "z1", "z2"],
    ["-z3", "z3", "z2", "-z1"]]}"#;
const M24: &str = r#"{"l": 2, "entries": [["z1", "z2"], ["-z1"]]}"#;
const ZERO_ROW: &str = r#"{"l": 2, "entries": [["0", "0"], ["0", "z1"]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goodpair"))
        .args(args)
        .env("GOODPAIR_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_reports_definite_determinants() {
    let dir = TempDir::new().unwrap();
    let out = run(&["verify", s(&file(&dir, "m37.json", M37))]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["det"], "z1^4+2*z1^2*z2^2+z2^4+4*z3^4");
    assert_eq!(v["kind"], "PositiveDefinite");
    assert_eq!(v["degree"], 4);
    assert_eq!(v["obstruction"], "Passes");

    let out = run(&["verify", s(&file(&dir, "m24.json", M24))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["kind"], "NegativeDefinite");
}

#[test]
fn verify_zero_row_is_negative() {
    let dir = TempDir::new().unwrap();
    let out = run(&["verify", s(&file(&dir, "z.json", ZERO_ROW))]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["det"], "0");
    assert_eq!(v["kind"], "IdenticallyZero");
}

#[test]
fn malformed_and_asymmetric_input() {
    let dir = TempDir::new().unwrap();
    let out = run(&["verify", s(&file(&dir, "bad.json", "{\"l\": 2,\n \"entries\": [[\"z1\",]]}"))]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    let asym = r#"{"l": 2, "entries": [["z1", "z2"], ["z1", "z2"]]}"#;
    let out = run(&["verify", s(&file(&dir, "asym.json", asym))]);
    assert_eq!(out.status.code(), Some(4));

    let out = run(&["verify", s(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn search_small_pairs() {
    let dir = TempDir::new().unwrap();
    let outdir = dir.path().join("out");
    let out = run(&["search", "2", "4", "--out", s(&outdir)]);
    assert_eq!(out.status.code(), Some(0));
    let summary = stdout_json(&out);
    assert_eq!(summary["exhaustive"], true);
    assert!(summary["accepted"].as_u64().unwrap() >= 1);
    let candidates: Value = serde_json::from_str(&std::fs::read_to_string(outdir.join("candidates.json")).unwrap()).unwrap();
    assert_eq!(candidates.as_array().unwrap().len(), summary["accepted"].as_u64().unwrap() as usize);

    let out = run(&["search", "2", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Obstruction 1"));

    let out = run(&["search", "2", "5", "--force"]);
    assert_eq!(out.status.code(), Some(1));
    let summary = stdout_json(&out);
    assert_eq!(summary["accepted"], 0);
    assert_eq!(summary["exhaustive"], true);
}

#[test]
fn search_output_is_deterministic() {
    let a = run(&["search", "3", "6", "--force", "--mode", "randomized", "--samples", "3000", "--seed", "7"]);
    let b = run(&["search", "3", "6", "--force", "--mode", "randomized", "--samples", "3000", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["exhaustive"], false);
}

#[test]
fn search_resumes_from_a_checkpoint() {
    let dir = TempDir::new().unwrap();
    let ck = dir.path().join("ck.json");
    let first = run(&["search", "2", "6", "--max-prefixes", "3", "--checkpoint", s(&ck)]);
    assert_eq!(stdout_json(&first)["exhaustive"], false);
    let resumed = run(&["search", "2", "6", "--checkpoint", s(&ck), "--resume"]);
    let fresh = run(&["search", "2", "6"]);
    let (r, f) = (stdout_json(&resumed), stdout_json(&fresh));
    assert_eq!(r["exhaustive"], true);
    assert_eq!(r["stats"], f["stats"]);
    assert_eq!(r["accepted"], f["accepted"]);

    std::fs::write(&ck, "{\"magic\": \"something-else\"}").unwrap();
    let bad = run(&["search", "2", "6", "--checkpoint", s(&ck), "--resume"]);
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn construct_then_check2_and_cover() {
    let dir = TempDir::new().unwrap();
    let manifold = dir.path().join("m37.manifold.json");
    let out = run(&["construct", "--matrix", s(&file(&dir, "m37.json", M37)), "--out", s(&manifold), "--label", "M37"]);
    assert_eq!(out.status.code(), Some(0));
    let spec: Value = serde_json::from_str(&std::fs::read_to_string(&manifold).unwrap()).unwrap();
    assert_eq!(spec["n"], 7);
    assert_eq!(spec["l"], 3);
    assert_eq!(spec["label"], "M37");

    let out = run(&["check2", s(&manifold)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["kind"], "PositiveDefinite");

    let out = run(&["cover", "--manifold", s(&manifold), "--alpha", "1/4", "--delta-ladder", "3:6"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["levels"].as_array().unwrap().len(), 4);
    assert_eq!(report["expected_slope"], 3);

    let out = run(&["cover", "--manifold", s(&manifold), "--alpha", "1", "--delta-ladder", "3:4", "--strict"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("‖∇φ(x)‖ ≥ C·α·sup‖∇²φ‖"));
}

#[test]
fn construct_with_custom_forms() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m24.json", M24);
    let out = run(&["construct", "--matrix", s(&m), "--forms", "s1+s2; s2"]);
    assert_eq!(out.status.code(), Some(0));
    let spec = stdout_json(&out);
    assert_eq!(spec["n"], 4);
    let out = run(&["construct", "--matrix", s(&m), "--forms", "s1; 2*s1"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn analyze_reports_the_critical_exponent() {
    let out = run(&["analyze", "--n", "7", "--l", "3", "--tau", "7", "--s", "4", "--q-max", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["s_star"], "4");
    assert_eq!(v["classification"], "critical");
    assert_eq!(v["shells"].as_array().unwrap().len(), 20);
    assert_eq!(v["shells"][0]["term"], 2186.0);
    let out = run(&["analyze", "--n", "7", "--l", "3", "--tau", "6", "--s", "4"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn catalog_lists_the_examples() {
    let out = run(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let rows = v.as_array().unwrap();
    let find = |label: &str| rows.iter().find(|r| r["label"].as_str().unwrap().starts_with(label)).unwrap().clone();
    let m37 = find("M37");
    assert_eq!(m37["condition_i"], "[4, 6)");
    assert_eq!(m37["condition_ii"]["kind"], "PositiveDefinite");
    assert_eq!(find("M_delta")["condition_i"], "(I) fails: dim 2");
    let e2 = find("e2");
    assert!(e2["condition_ii"]["kind"].as_str().unwrap().ends_with("Definite"));
}
