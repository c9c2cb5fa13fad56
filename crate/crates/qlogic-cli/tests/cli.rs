//! End-to-end checks of the binary: exit codes, report output, records.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qlogic-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn qlogic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlogic")).args(args).output().unwrap()
}

const BELL_EPRB: &str = r#"
scenario = "eprb"
trials = 2000

[state]
matrix = [[[0.7071067811865476, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.7071067811865476, 0.0]]]
"#;

#[test]
fn passing_run_exits_zero_with_csv_report() {
    let dir = scratch_dir("pass");
    let config = write_config(&dir, "eprb.toml", BELL_EPRB);
    let out = qlogic(&["run", "--config", config.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("check_name,exact,empirical,tolerance,pass"));
    assert!(stdout.contains("pass"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = scratch_dir("determinism");
    let config = write_config(&dir, "eprb.toml", BELL_EPRB);
    let first = qlogic(&["run", "--config", config.to_str().unwrap(), "--format", "csv"]);
    let second = qlogic(&["run", "--config", config.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let reseeded = qlogic(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "csv",
        "--seed",
        "43",
    ]);
    assert_eq!(reseeded.status.code(), Some(0));
    assert_ne!(first.stdout, reseeded.stdout, "a new seed must change the sampled counts");
}

#[test]
fn failed_check_exits_one() {
    let dir = scratch_dir("fail");
    let config = write_config(
        &dir,
        "eigen.toml",
        "scenario = \"theorem2\"\n[state]\nvector = [[1.0, 0.0], [0.0, 0.0]]\n",
    );
    let out = qlogic(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verdict: fail"));
}

#[test]
fn unnormalized_state_exits_two() {
    let dir = scratch_dir("norm");
    let config = write_config(
        &dir,
        "bad.toml",
        "scenario = \"theorem1\"\n[state]\nvector = [[1.2, 0.0], [0.0, 0.0]]\n",
    );
    let out = qlogic(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not normalized"));
}

#[test]
fn unknown_scenario_exits_three() {
    let dir = scratch_dir("unknown");
    let config = write_config(
        &dir,
        "bad.toml",
        "scenario = \"bogus\"\n[state]\nvector = [[1.0, 0.0]]\n",
    );
    let out = qlogic(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn syntax_error_exits_four() {
    let dir = scratch_dir("syntax");
    let config = write_config(&dir, "bad.toml", "scenario = \n");
    let out = qlogic(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn dimension_mismatch_exits_five() {
    let dir = scratch_dir("dims");
    let config = write_config(
        &dir,
        "bad.toml",
        "scenario = \"theorem1\"\ndims = [3]\n[state]\nvector = [[1.0, 0.0], [0.0, 0.0]]\n",
    );
    let out = qlogic(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn missing_config_exits_six() {
    let out = qlogic(&["run", "--config", "/nonexistent/qlogic.toml"]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn validate_echoes_scenario_and_digest() {
    let dir = scratch_dir("validate");
    let config = write_config(&dir, "eprb.toml", BELL_EPRB);
    let out = qlogic(&["validate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("ok: scenario eprb (digest "));
}

#[test]
fn records_and_report_files_are_written() {
    let dir = scratch_dir("files");
    let records_path = dir.join("records.txt");
    let report_path = dir.join("report.csv");
    let config_text = format!(
        "scenario = \"eprb\"\ntrials = 5\nrecords = {:?}\n\n[state]\nmatrix = [[[0.7071067811865476, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.7071067811865476, 0.0]]]\n",
        records_path.to_str().unwrap()
    );
    let config = write_config(&dir, "eprb.toml", &config_text);
    let out = qlogic(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty(), "report should go to the file, not stdout");

    let records = fs::read_to_string(&records_path).unwrap();
    assert_eq!(records.lines().count(), 5);
    assert!(records.starts_with("0, ch1="));

    let report = fs::read_to_string(&report_path).unwrap();
    assert!(report.starts_with("check_name,exact,empirical,tolerance,pass"));
}
