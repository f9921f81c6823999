use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/disk.space")
}

fn pervglue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pervglue"))
        .args(args)
        .env_remove(pervglue_cli::REPORT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = pervglue(&full);
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json report");
    (out.status.code().unwrap(), doc)
}

#[test]
fn k_good_passes() {
    let f = fixture();
    let (code, doc) = json(&[
        "check-perverse-closed",
        "--space",
        f.to_str().unwrap(),
        "--closed",
        "s,a",
        "--max-rank",
        "2",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0);
    assert_eq!(doc["report"]["verdict"], "pass");
}

#[test]
fn single_point_fails_with_degree_zero_witness() {
    let f = fixture();
    let (code, doc) = json(&["check-perverse-closed", "--space", f.to_str().unwrap(), "--closed", "s"]);
    assert_eq!(code, 1);
    let w = &doc["report"]["witnesses"][0]["Nonvanishing"];
    assert_eq!(w["degree"], 0);
    assert_eq!(w["test"], "trivial rank 1");
    assert_eq!(w["dims"][0], serde_json::json!(["s", 1]));
}

#[test]
fn roundtrip_passes_and_is_deterministic() {
    let f = fixture();
    let args = ["roundtrip", "--space", f.to_str().unwrap(), "--closed", "s,a", "--trials", "6", "--seed", "7"];
    let (code, first) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(first["report"]["details"]["trials"].as_array().unwrap().len(), 6);
    let (_, second) = json(&args);
    assert_eq!(first["report"], second["report"]);
}

#[test]
fn hundred_round_trips_pass() {
    let f = fixture();
    let (code, doc) = json(&["roundtrip", "--space", f.to_str().unwrap(), "--closed", "s,a", "--trials", "100", "--seed", "7"]);
    assert_eq!(code, 0);
    let trials = doc["report"]["details"]["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 100);
    assert!(trials.iter().all(|t| t["rank_a"].is_u64() && t["rank_b"].is_u64() && t["cp"] == "ok"));
}

#[test]
fn other_commands_pass_on_fixture() {
    let f = fixture();
    let f = f.to_str().unwrap();
    for args in [
        vec!["check-space", "--space", f],
        vec!["describe-fgt", "--space", f, "--closed", "K_good"],
        vec!["glue", "--space", f],
        vec!["perverse-check", "--space", f],
        vec!["selftest"],
    ] {
        let (code, doc) = json(&args);
        assert_eq!(code, 0, "{args:?}: {doc}");
    }
}

#[test]
fn describe_fgt_ranks() {
    let f = fixture();
    let (_, doc) = json(&["describe-fgt", "--space", f.to_str().unwrap(), "--closed", "K_good"]);
    let d = &doc["report"]["details"];
    assert_eq!(d["L1"]["rank_t"], 0);
    assert_eq!(d["L2"]["rank_t"], 1);
    assert_eq!(d["J"]["rank_t"], 1);
    assert_eq!(d["J"]["dim_f"], 2);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.space");
    std::fs::write(&bad, "[poset]\nelements = x y\nx<y\n[strata]\nS = y\nd = 0\nc = 1\n").unwrap();
    let out = pervglue(&["check-space", "--space", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("line 5"), "{text}");
    assert_eq!(pervglue(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(pervglue(&["check-space", "--space", "/nonexistent.space"]).status.code(), Some(2));
}

#[test]
fn reports_land_in_report_dir() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture();
    let out = Command::new(env!("CARGO_BIN_EXE_pervglue"))
        .args(["check-space", "--space", f.to_str().unwrap()])
        .env(pervglue_cli::REPORT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("check-space.json")).unwrap()).unwrap();
    assert_eq!(doc["report"]["command"], "check-space");
    assert!(dir.path().join("check-space.txt").exists());
}
