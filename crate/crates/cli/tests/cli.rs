//! End-to-end tests of the binary: subcommand plumbing, reproducible CSV,
//! config-file runs, and error exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stable-sets"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn toy_args(out: &str) -> Vec<String> {
    [
        "build-schedule",
        "--q",
        "3",
        "--mode",
        "conj_chi",
        "--eps",
        "0.5",
        "--d-max",
        "2",
        "--eps-final",
        "0.25",
        "--growth",
        "2",
        "--budget",
        "50000000",
        "--out",
        out,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn build_toy(dir: &Path) {
    let args = toy_args("toy.json");
    let out = run(&args.iter().map(|s| s.as_str()).collect::<Vec<_>>(), dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("toy.json").exists());
}

#[test]
fn build_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    build_toy(dir.path());
    let out = run(
        &["verify", "--schedule", "toy.json", "--no-timestamp"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("label,lo,hi,stride,numerator,denominator,frequency,context"));
    assert!(text.contains("density,"));
    assert!(text.contains("stability_defect_p2,"));
    assert!(text.contains("intersection_0_1_2,"));
    // defect at p = q vanishes identically
    for line in text
        .lines()
        .filter(|l| l.starts_with("stability_defect_p3,"))
    {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[4], "0", "p = 3 defect row: {line}");
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    build_toy(dir.path());
    let args = [
        "verify",
        "--schedule",
        "toy.json",
        "--no-timestamp",
        "--stride",
        "7",
    ];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    // and the worker count must not change any counted number
    let c = run(
        &[
            "verify",
            "--schedule",
            "toy.json",
            "--no-timestamp",
            "--stride",
            "7",
            "--workers",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn timestamp_line_is_the_only_difference() {
    let dir = tempfile::tempdir().unwrap();
    build_toy(dir.path());
    let with_ts = run(
        &["verify", "--schedule", "toy.json", "--stride", "11"],
        dir.path(),
    );
    let without = run(
        &[
            "verify",
            "--schedule",
            "toy.json",
            "--stride",
            "11",
            "--no-timestamp",
        ],
        dir.path(),
    );
    let with_ts = String::from_utf8(with_ts.stdout).unwrap();
    let without = String::from_utf8(without.stdout).unwrap();
    let stripped: Vec<&str> = with_ts
        .lines()
        .filter(|l| !l.starts_with("# generated "))
        .collect();
    assert_eq!(stripped.join("\n") + "\n", without);
    assert!(with_ts.lines().any(|l| l.starts_with("# generated ")));
}

#[test]
fn find_t_reports_and_respects_budget() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run(
        &[
            "find-t",
            "--q",
            "3",
            "--mode",
            "one",
            "--d-max",
            "3",
            "--eps",
            "0.5",
            "--no-timestamp",
        ],
        dir.path(),
    );
    assert!(ok.status.success());
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("prime,target_turns,phase_turns,chordal_error"));
    assert!(text.contains("\n2,"));

    // starved budget: nonzero exit
    let starved = run(
        &[
            "find-t", "--q", "3", "--mode", "conj_chi", "--d-max", "11", "--eps", "0.05",
            "--budget", "10",
        ],
        dir.path(),
    );
    assert!(!starved.status.success());
    assert!(String::from_utf8_lossy(&starved.stderr).contains("budget exhausted"));
}

#[test]
fn locate_and_member_describe_a_number() {
    let dir = tempfile::tempdir().unwrap();
    build_toy(dir.path());
    let loc = run(&["locate", "--schedule", "toy.json", "1"], dir.path());
    assert!(loc.status.success());
    assert!(String::from_utf8_lossy(&loc.stdout).contains("pre-epoch"));
    let mem = run(&["member", "--schedule", "toy.json", "27"], dir.path());
    assert!(mem.status.success());
    let text = String::from_utf8(mem.stdout).unwrap();
    assert!(
        text.contains("member: true"),
        "3^3 is always a member: {text}"
    );
    assert!(text.contains("margin: inf"));
}

#[test]
fn config_file_runs_and_enforces_one_schedule_source() {
    let dir = tempfile::tempdir().unwrap();
    build_toy(dir.path());
    let cfg = serde_json::json!({
        "command": "verify",
        "schedule_file": "toy.json",
        "stride": 7,
        "no_timestamp": true,
        "format": "csv",
        "out": "report.csv",
    });
    std::fs::write(dir.path().join("run.json"), cfg.to_string()).unwrap();
    let out = run(&["run", "--config", "run.json"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.contains("density,"));

    // same config again: byte identical artifact
    let first = report;
    run(&["run", "--config", "run.json"], dir.path());
    let second = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(first, second);

    let bad = serde_json::json!({
        "command": "verify",
        "schedule_file": "toy.json",
        "build": {
            "q": 3, "mode": "conj_chi", "eps": [0.5], "d_max": [2],
            "growth": 2.0, "t0": 0.0, "search_budget": 1000,
        },
    });
    std::fs::write(dir.path().join("bad.json"), bad.to_string()).unwrap();
    let out = run(&["run", "--config", "bad.json"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exactly one schedule source"));
}

#[test]
fn lemma_emits_grid_bound_and_oscillation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "lemma",
            "--t1",
            "20",
            "--t2",
            "2000",
            "--m",
            "2",
            "--n-max",
            "200000",
            "--osc-from",
            "4",
            "--osc-to",
            "6",
            "--no-timestamp",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# lemma_error_bound"));
    assert!(text.contains("arc_pair_0_0,"));
    assert!(text.contains("fixed_t_upper_half,"));
    // grid cells partition the scan
    let total: u64 = text
        .lines()
        .filter(|l| l.starts_with("arc_pair_"))
        .map(|l| l.split(',').nth(4).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 200000);
}

#[test]
fn schedule_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    build_toy(dir.path());
    let cache = dir.path().join(".schedule-cache");
    assert!(cache.exists(), "cache directory appears after a build");
    let entries = std::fs::read_dir(&cache).unwrap().count();
    assert_eq!(entries, 1);
    // second build with identical parameters hits the cache
    let args = toy_args("toy2.json");
    let out = run(
        &args.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let a = std::fs::read_to_string(dir.path().join("toy.json")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("toy2.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn shipped_configs_are_well_formed() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        seen += 1;
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let cmd = v["command"].as_str().expect("command present");
        let has_build = v.get("build").is_some();
        let has_file = v.get("schedule_file").is_some();
        match cmd {
            "verify" | "liouville" => assert!(has_build ^ has_file, "{path:?}"),
            "lemma" => assert!(v.get("lemma").is_some(), "{path:?}"),
            other => panic!("unexpected command {other} in {path:?}"),
        }
    }
    assert_eq!(seen, 4, "all four desk configs ship");
}

#[test]
fn epochs_flag_must_match_the_lists() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "build-schedule",
            "--q",
            "3",
            "--epochs",
            "2",
            "--eps",
            "0.5",
            "--d-max",
            "2",
            "--budget",
            "1000",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--epochs 2 does not match"));
}
