use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gql_harness::{read_records, Format};

const CONFIG: &str = r#"{
  "name": "cli smoke",
  "learner": "family_parity",
  "trials": 25,
  "seed": 9,
  "grid": [
    {"n": 3, "candidates": {"kind": "all_graphs"}},
    {"n": 4, "candidates": {"kind": "all_graphs"}}
  ],
  "thresholds": {"min_success": 0.9}
}"#;

fn gql(args: &[&str], threads_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gql"));
    cmd.args(args).env_remove("GQL_THREADS");
    if let Some(t) = threads_env {
        cmd.env("GQL_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn csv_has_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", CONFIG);
    let out = dir.path().join("out.csv");
    let result = gql(&["run", "--config", s(&config), "--out", s(&out)], None);
    assert_eq!(
        result.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 25);
    assert!(text.starts_with("seed,n,m,d,k,or_queries,parity_queries,copies,charged_quantum,success,ms\n"));
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", CONFIG);
    let (csv, json) = (dir.path().join("o.csv"), dir.path().join("o.json"));
    assert_eq!(
        gql(&["run", "--config", s(&config), "--out", s(&csv)], None)
            .status
            .code(),
        Some(0)
    );
    let result = gql(
        &[
            "run",
            "--config",
            s(&config),
            "--out",
            s(&json),
            "--format",
            "json",
        ],
        None,
    );
    assert_eq!(result.status.code(), Some(0));
    let a = read_records(Format::Csv, std::fs::File::open(&csv).unwrap()).unwrap();
    let b = read_records(Format::Json, std::fs::File::open(&json).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 50);
}

#[test]
fn seed_and_trials_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", CONFIG);
    let out = dir.path().join("o.csv");
    let read = |args: &[&str]| {
        let mut full = vec!["run", "--config", s(&config), "--out", s(&out)];
        full.extend_from_slice(args);
        assert_eq!(gql(&full, None).status.code(), Some(0));
        std::fs::read_to_string(&out).unwrap()
    };
    let base = read(&[]);
    assert_eq!(read(&["--seed", "9"]), base);
    assert_ne!(read(&["--seed", "10"]), base);
    assert_eq!(read(&["--trials", "3"]).lines().count(), 1 + 2 * 3);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", CONFIG);
    let mut outputs = Vec::new();
    for (i, (flag, env)) in [("1", None), ("4", None), ("1", Some("3"))]
        .into_iter()
        .enumerate()
    {
        let out = dir.path().join(format!("o{i}.csv"));
        let result = gql(
            &["run", "--config", s(&config), "--out", s(&out), "--threads", flag],
            env,
        );
        assert_eq!(result.status.code(), Some(0));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn threshold_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // Two Bell samples cannot single out one of 64 graphs.
    let text = CONFIG
        .replace(r#"{"n": 3, "candidates": {"kind": "all_graphs"}},"#, "")
        .replace(
            r#""candidates": {"kind": "all_graphs"}}"#,
            r#""candidates": {"kind": "all_graphs"}, "samples": 2}"#,
        );
    let config = write_config(dir.path(), "c.json", &text);
    let out = dir.path().join("o.csv");
    let result = gql(&["run", "--config", s(&config), "--out", s(&out)], None);
    assert_eq!(result.status.code(), Some(1));
    assert!(out.exists());
}

#[test]
fn zero_trials_need_allow_empty() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", CONFIG);
    let out = dir.path().join("o.csv");
    let result = gql(
        &["run", "--config", s(&config), "--out", s(&out), "--trials", "0"],
        None,
    );
    assert_eq!(result.status.code(), Some(2));
    let result = gql(
        &[
            "run",
            "--config",
            s(&config),
            "--out",
            s(&out),
            "--trials",
            "0",
            "--allow-empty",
        ],
        None,
    );
    assert_eq!(result.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 1);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"name": "x", "learner": "nope", "grid": []}"#,
    );
    assert_eq!(gql(&["run", "--config", s(&bad)], None).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(
        gql(&["run", "--config", s(&missing)], None).status.code(),
        Some(2)
    );
    assert_eq!(gql(&["run", "--bogus"], None).status.code(), Some(2));
    assert_eq!(gql(&[], None).status.code(), Some(2));
}
