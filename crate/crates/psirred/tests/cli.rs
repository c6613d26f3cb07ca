//! End-to-end tests of the `psirred` binary.

use std::path::Path;
use std::process::{Command, Output};

fn psirred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psirred"))
        .args(args)
        .env_remove("PSIRRED_WEYL_BUDGET")
        .output()
        .expect("binary runs")
}

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
        .display()
        .to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn check_reports_status_and_witness() {
    let out = psirred(&["check", &corpus("03_gl3_chain.json"), "--trace"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["verdict"]["status"], "Inconclusive");
    assert_eq!(v["verdict"]["witness"]["kind"], "pair");
    assert!(v["verdict"]["trace"]
        .as_array()
        .is_some_and(|t| !t.is_empty()));
}

#[test]
fn trace_is_omitted_by_default() {
    let v = json(&psirred(&["check", &corpus("01_gl2_trivial.json")]));
    assert!(v["verdict"]["trace"]
        .as_array()
        .is_none_or(|t| t.is_empty()));
}

#[test]
fn timing_wraps_the_report() {
    let v = json(&psirred(&["check", &corpus("02_gl2_abs.json"), "--timing"]));
    assert!(v["elapsed_ms"].is_number());
    assert_eq!(v["output"]["verdict"]["status"], "Irreducible");
}

#[test]
fn poles_subcommand_lists_the_table() {
    let v = json(&psirred(&["poles", "--case", "ii3"]));
    let poles: Vec<&str> = v["poles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(poles, ["-1/2", "-1/4", "0", "1/4", "1/2"]);
}

#[test]
fn schema_errors_exit_with_one_and_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"schema_version": 1, "group": {"family": "GL", "size": 2, "colour": 1}, "smooth_group": {"generators": []}}"#,
    )
    .unwrap();
    let out = psirred(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("group"));
}

#[test]
fn batch_isolates_malformed_entries() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(corpus("01_gl2_trivial.json"), dir.path().join("a.json")).unwrap();
    std::fs::write(dir.path().join("b.json"), "{ not json").unwrap();
    let out = psirred(&["batch", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries[0]["report"].is_object());
    assert!(entries[1]["error"].is_string());
    assert_eq!(v["summary"]["total"], 2);
    assert_eq!(v["summary"]["errors"], 1);
}

#[test]
fn batch_output_is_deterministic() {
    let dir = corpus("");
    let a = psirred(&["batch", &dir]);
    let b = psirred(&["batch", &dir]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
