use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn atlas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nls-atlas"))
        .args(args)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SHORT_RUN: &str = r#"
[grid]
extent = 10.0
points = 1024

[controls]
dt = 2e-4
t_end = 0.2
checkpoint_every = 50
"#;

#[test]
fn classify_reports_the_three_sides_of_the_well() {
    let dir = tempfile::tempdir().unwrap();
    for (lambda, verdict) in [
        ("0.9", "InsideWell"),
        ("1.0", "Boundary"),
        ("1.1", "OutsideWellAboveGradient"),
    ] {
        let out = dir.path().join(lambda);
        let o = atlas(&[
            "classify",
            "--lambda",
            lambda,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let rec = json(&out.join("classify.json"));
        assert_eq!(rec["status"]["verdict"], verdict, "λ = {lambda}");
        assert!(out.join("manifest.json").exists());
    }
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "dimension = 1\n").unwrap();
    let o = atlas(&[
        "--config",
        bad.to_str().unwrap(),
        "exponents",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = atlas(&[
        "--p",
        "2",
        "exponents",
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_sweep_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = atlas(&["sweep", "--lambdas", "", "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(!out.join("atlas.csv").exists());
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn injected_fault_fails_selftest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = atlas(&[
        "selftest",
        "--suite",
        "pohozaev",
        "--inject-fault",
        "corrupt-thresholds",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(1));
    let summary = json(&dir.path().join("selftest.json"));
    assert_eq!(summary["passed"], false);
}

#[test]
fn gronwall_selftest_passes_all_instances() {
    let dir = tempfile::tempdir().unwrap();
    let o = atlas(&[
        "--seed",
        "7",
        "selftest",
        "--suite",
        "gronwall",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let summary = json(&dir.path().join("selftest.json"));
    let suite = &summary["suites"][0];
    assert_eq!(suite["failures"], 0);
    assert_eq!(suite["detail"]["verified"], 100);
}

fn sweep_with(dir: &Path, jobs: &str, name: &str) -> String {
    let cfg = dir.join("short.toml");
    std::fs::write(&cfg, SHORT_RUN).unwrap();
    let out = dir.join(name);
    let o = atlas(&[
        "--config",
        cfg.to_str().unwrap(),
        "--jobs",
        jobs,
        "sweep",
        "--lambdas",
        "0.8,1.0,1.2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out.join("atlas.csv")).unwrap()
}

#[test]
fn parallel_sweep_matches_serial() {
    let dir = tempfile::tempdir().unwrap();
    let serial = sweep_with(dir.path(), "1", "serial");
    let parallel = sweep_with(dir.path(), "2", "parallel");
    assert_eq!(serial, parallel);
    assert_eq!(serial.lines().count(), 4);
}

#[test]
fn manifest_reproduces_its_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = sweep_with(dir.path(), "1", "first");
    let manifest = dir.path().join("first/manifest.json");
    let again = dir.path().join("again");
    let o = atlas(&[
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read_to_string(again.join("atlas.csv")).unwrap(),
        first
    );
}
