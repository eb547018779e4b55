use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dagbench"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn stats_counts_tasks() {
    let out = run(&["stats", "--bundle", path(&fixture("shapes"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("Total Tasks: 3"), "{text}");
    assert!(text.contains("Total Subtasks: 9"), "{text}");
}

#[test]
fn classify_reports_profiles() {
    let out = run(&["classify", "--bundle", path(&fixture("shapes"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let diamond = text.lines().find(|l| l.starts_with("diamond")).unwrap();
    assert!(diamond.contains("3 (Medium)"), "{diamond}");
    let chain = text.lines().find(|l| l.starts_with("chain5")).unwrap();
    assert!(chain.contains("long-range-planning"), "{chain}");

    let out = run(&["classify", "--bundle", path(&fixture("shapes")), "--json"]);
    let value: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value.is_array() || value.is_object());
}

#[test]
fn suite_lists_matching_tasks_only() {
    let out = run(&[
        "suite",
        "--bundle",
        path(&fixture("shapes")),
        "--capability",
        "long-range-planning",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let lines: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 1, "{lines:?}");
    assert!(lines[0].ends_with("chain5.json"));

    let out = run(&[
        "suite",
        "--bundle",
        path(&fixture("shapes")),
        "--capability",
        "nonsense",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn evaluate_recorded_trajectory() {
    let out = run(&[
        "evaluate",
        "--bundle",
        path(&fixture("demo")),
        "--task",
        "12",
        "--trajectory",
        "12(0)",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["sr"], Value::Bool(true));
    assert_eq!(report["steps_used"], 7);
}

#[test]
fn simulate_writes_csv() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("results.csv");
    let out = run(&[
        "simulate",
        path(&fixture("batch.json")),
        "--out",
        path(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("task_id,capabilities,cr,lc,sr,ams,steps")
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn verify_recorded_subtask() {
    let out = run(&[
        "verify",
        "--bundle",
        path(&fixture("demo")),
        "--subtask",
        "0e5f1a37-8c42-4d90-b6a3-71f2c9d8e054",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let outcome: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(outcome["status"], "verified");
}

#[test]
fn compose_writes_tasks_and_reports_infeasible() {
    let dir = tempdir().unwrap();
    let out = run(&[
        "compose",
        "--bundle",
        path(&fixture("shapes")),
        "--capability",
        "long-range-planning",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let written = stdout(&out);
    let first = written.lines().next().unwrap();
    let task: Value = serde_json::from_str(&fs::read_to_string(first).unwrap()).unwrap();
    assert_eq!(task["dag"]["nodes"].as_array().unwrap().len(), 5);

    let out = run(&[
        "compose",
        "--bundle",
        path(&fixture("shapes")),
        "--require",
        "knowledge=hard",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 5);
    assert!(
        stderr(&out).contains("closest profile:"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&[])), 2);
    let out = run(&[
        "compose",
        "--bundle",
        "x",
        "--out",
        "y",
        "--require",
        "width=hard",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_bundle_exits_3() {
    let dir = tempdir().unwrap();
    let out = run(&["stats", "--bundle", path(&dir.path().join("absent"))]);
    assert_eq!(code(&out), 3);
}

#[test]
fn dangling_reference_exits_4() {
    let dir = tempdir().unwrap();
    let tasks = dir.path().join("tasks");
    fs::create_dir_all(&tasks).unwrap();
    fs::copy(fixture("demo/tasks/12.json"), tasks.join("12.json")).unwrap();
    let out = run(&["stats", "--bundle", path(dir.path())]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}
