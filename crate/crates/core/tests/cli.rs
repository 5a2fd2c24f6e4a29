mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use museum_swn::config::parse_config;
use museum_swn::experiment::{SweepResult, SWEEP_HEADER};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_museum-swn")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn graph_reports_metrics_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["graph", "--seed", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(out.contains("nodes          20"));
    assert!(out.contains("edges          40"));
    let graph = read(dir.path(), "graph.txt");
    assert!(graph.starts_with("20 40\n"));
    assert!(read(dir.path(), "gallery.txt").contains("info 20\n"));
}

#[test]
fn run_writes_identical_outputs_each_time() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        ok(&["run", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
    }
    for name in ["events.csv", "occupancy.csv", "queues.csv", "summary.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    let occ = read(a.path(), "occupancy.csv");
    assert!(occ.starts_with("tick,painting_0,painting_1,"));
    assert_eq!(occ.lines().count(), 601);
    assert!(read(a.path(), "events.csv").starts_with("tick,visitor,event,node\n0,"));
    let summary: serde_json::Value = serde_json::from_str(&read(a.path(), "summary.json")).unwrap();
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["exited"], 50);
}

#[test]
fn sweep_matches_golden_and_ignores_thread_count() {
    let one = tempfile::tempdir().unwrap();
    let four = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&one, "1"), (&four, "4")] {
        ok(&["sweep", "--seeds", "7", "--threads", threads, "--out", dir.path().to_str().unwrap()]);
    }
    let csv = read(one.path(), "sweep.csv");
    assert_eq!(csv, read(four.path(), "sweep.csv"));
    assert_eq!(read(one.path(), "summary.csv"), read(four.path(), "summary.csv"));
    assert_eq!(csv.lines().count(), 1 + 5 * 3);
    common::check_golden("sweep_default_seed7.csv", &csv);

    let parsed = SweepResult::from_csv(&csv).unwrap();
    assert_eq!(parsed.to_csv(), csv);
    let summary = ok(&["summary", one.path().join("sweep.csv").to_str().unwrap()]);
    assert_eq!(summary, read(one.path(), "summary.csv"));
}

#[test]
fn sweep_grid_flags() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "sweep",
        "--p",
        "0,0.5",
        "--policies",
        "hotspot,swn_guided",
        "--seeds",
        "1..4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rows = SweepResult::from_csv(&read(dir.path(), "sweep.csv")).unwrap().rows;
    assert_eq!(rows.len(), 2 * 2 * 3);
    assert_eq!((rows[0].p, rows[0].policy.name(), rows[0].seed), (0.0, "hotspot", 1));
    assert_eq!((rows[11].p, rows[11].policy.name(), rows[11].seed), (0.5, "swn_guided", 3));
}

#[test]
fn empty_sweep_is_header_only() {
    assert_eq!(SweepResult { rows: vec![] }.to_csv(), format!("{SWEEP_HEADER}\n"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    fs::write(&path, format!("{SWEEP_HEADER}\n")).unwrap();
    let out = cli(&["summary", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.cfg");
    let text = "# small room\ntopology.n = 12\ntopology.k = 2\ntopology.p = 0.25\npopulation.visitors = 15\npolicy.kind = hotspot\nsim.horizon = 300\n";
    fs::write(&path, text).unwrap();
    let out = dir.path().join("out");
    ok(&["run", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let summary: serde_json::Value = serde_json::from_str(&read(&out, "summary.json")).unwrap();
    let emitted = summary["config"].as_str().unwrap();
    let cfg = parse_config(emitted).unwrap();
    assert_eq!(cfg, parse_config(text).unwrap());
    assert_eq!(parse_config(&cfg.emit()).unwrap().emit(), emitted);
    assert_eq!(summary["horizon"], 300);
    assert_eq!(read(&out, "queues.csv").lines().count(), 301);
}

#[test]
fn bad_input_exits_with_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "topology.p = 1.5\n").unwrap();
    let out = cli(&["run", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));

    let out = cli(&["run", "--config", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!cli(&["sweep", "--policies", "tour_guide"]).status.success());
    assert!(!cli(&["sweep", "--seeds", "x"]).status.success());
}
