//! The `tile` binary: exit codes, summaries, records and replay.

use std::path::Path;
use std::process::{Command, Output};

fn tile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tile")).args(args).output().expect("tile runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn strip_check_prints_constants() {
    let o = tile(&["strip-check", "--params", "fig1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "(a)(b)(c) hold; R0=22 R=145/3 R/r=290");
    let o = tile(&["strip-check", "--params", "fig2", "--unconditional"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("R0=10 R=17 R/r=68"));
}

#[test]
fn strip_check_large_r_exits_one() {
    let o = tile(&["strip-check", "--params", "fig1", "--r", "1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("(b)"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["strip-check", "--unknown"][..],
        &["frobnicate"],
        &["strip-check", "--params", "fig9"],
        &["strip-check", "--delta", "1/0"],
        &["body", "--eps", "0"],
        &["schauder", "--dim", "3", "--depth", "2"],
        &["voronoi", "--space", "hilbert"],
    ] {
        assert_eq!(tile(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(tile(&["--help"]).status.code(), Some(0));
}

#[test]
fn record_replays_identically_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("vor.json");
    let svg = dir.path().join("vor.svg");
    let o = tile(&["voronoi", "--half-width", "4", "--seed", "3", "--out", path(&rec), "--svg", path(&svg)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("achieved R/r"));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let record: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(record["config"]["command"], "voronoi");
    for field in ["coverage", "violations", "tiles", "constants", "seed"] {
        assert!(record["report"].get(field).is_some(), "{field}");
    }
    assert_eq!(record["report"]["constants"]["fig1"], 290.0);

    let o = tile(&["verify", "--report", path(&rec)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("replay identical"));

    let mut tampered = record.clone();
    tampered["report"]["coverage"] = serde_json::json!(0.5);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, tampered.to_string()).unwrap();
    let o = tile(&["verify", "--report", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("replay differs"));

    assert_eq!(tile(&["verify", "--report", path(&dir.path().join("missing.json"))]).status.code(), Some(1));
}

#[test]
fn negative_controls_run_from_the_command_line() {
    let o = tile(&["verify", "--controls"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("negative controls flagged"));
}

#[test]
fn body_record_transports_to_l1() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("ball.json");
    let o = tile(&["body", "--dim", "2", "--pool", "10000", "--samples", "3000", "--out", path(&rec)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = dir.path().join("l1.json");
    let o = tile(&["mazur-transport", "--dim", "2", "--q", "1", "--source-report", path(&rec), "--pairs", "5000", "--samples", "3000", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let record: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(record["report"]["metric"], "l1");
    assert_eq!(record["report"]["coverage"], 1.0);

    let o = tile(&["mazur-transport", "--dim", "5", "--source-report", path(&rec)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn schauder_end_to_end() {
    let o = tile(&["schauder", "--dim", "6", "--p", "2", "--depth", "2", "--params", "fig1", "--samples", "3000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("coverage 1.0000"));
    assert!(stdout(&o).contains("R0=22 R=145/3 R/r=290"));
}
