use std::path::Path;
use std::process::{Command, Output};

use medsched::harness::read_csv;
use medsched::scheduler::Schedule;

fn medsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medsched"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_schedule_validate_render() {
    let dir = tempfile::tempdir().unwrap();
    let layout = dir.path().join("k7.json");
    let schedule = dir.path().join("s.json");
    let frames = dir.path().join("frames");

    let out = medsched(&["generate", "--nodes", "7", "-o", path(&layout)]);
    assert!(out.status.success());
    let out = medsched(&[
        "schedule",
        "--layout",
        path(&layout),
        "--delta",
        "0.09",
        "--overlap",
        "--duplicate",
        "--allow",
        "2",
        "--order",
        "seed:3",
        "-o",
        path(&schedule),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = Schedule::from_json(&std::fs::read_to_string(&schedule).unwrap()).unwrap();
    assert_eq!(s.allow, 2);
    assert_eq!(s.starts.len(), 21);

    let out = medsched(&[
        "validate",
        "--layout",
        path(&layout),
        "--schedule",
        path(&schedule),
        "--cycles",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid"));

    let out = medsched(&[
        "render",
        "--layout",
        path(&layout),
        "--schedule",
        path(&schedule),
        "--times",
        "0,500",
        "-o",
        path(&frames),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(frames.join("frame_000500.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("class=\"stub\""));
}

#[test]
fn validation_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let layout = golden.join("cross_layout.json");
    let out = medsched(&[
        "validate",
        "--layout",
        path(&layout),
        "--schedule",
        path(&golden.join("cross_allow1.json")),
        "--allow",
        "0",
        "-o",
        path(&dir.path().join("report.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    let out = medsched(&["schedule", "--layout", path(&junk)]);
    assert_eq!(out.status.code(), Some(2));
    let out = medsched(&[
        "schedule",
        "--layout",
        path(&dir.path().join("missing.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = medsched(&["generate", "--nodes", "5", "--order", "sideways"]);
    assert_eq!(out.status.code(), Some(2));

    let layout = dir.path().join("k5.json");
    assert!(medsched(&["generate", "--nodes", "5", "-o", path(&layout)])
        .status
        .success());
    let out = medsched(&["schedule", "--layout", path(&layout), "--delta", "0.7"]);
    assert_eq!(out.status.code(), Some(2));

    // an existing file where the frame directory should go
    let schedule = dir.path().join("s.json");
    assert!(
        medsched(&["schedule", "--layout", path(&layout), "-o", path(&schedule)])
            .status
            .success()
    );
    let out = medsched(&[
        "render",
        "--layout",
        path(&layout),
        "--schedule",
        path(&schedule),
        "--times",
        "0",
        "-o",
        path(&junk),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn small_experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("results.csv");
    let out = medsched(&[
        "experiment",
        "--preset",
        "ci",
        "--nodes",
        "7",
        "--orders",
        "2",
        "-o",
        path(&csv),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# medsched-results v1"));
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 2 * 4 * 6);
    assert!(rows.iter().all(|r| r.validated));
    assert!(String::from_utf8_lossy(&out.stderr).contains("K7"));
}
