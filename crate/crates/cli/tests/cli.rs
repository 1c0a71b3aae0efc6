use std::path::Path;
use std::process::{Command, Output};

fn doubling(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doubling"))
        .arg("--output")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn run_config(dir: &Path, text: &str) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, text).unwrap();
    doubling(&dir.join("out"), &["run", cfg.to_str().unwrap()])
}

fn kitaev(sites: usize) -> String {
    format!(
        r#"{{"kind": "kitaev", "sites": {sites}, "hopping": 1.0, "pairing": 1.0, "chemical_potential": 1.0, "periodic": true}}"#
    )
}

#[test]
fn malformed_config_exits_two_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run_config(
        tmp.path(),
        r#"{"experiment": "boundary", "name": "m", "subset": {"central": 4}, "margins": [2]}"#,
    );
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("configuration error"));
    assert!(!tmp.path().join("out").exists());
    let r = run_config(tmp.path(), "{not json");
    assert_eq!(r.status.code(), Some(2));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn invalid_values_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!(
        r#"{{"experiment": "transport", "name": "t", "model": {}, "steps": 1}}"#,
        kitaev(8)
    );
    assert_eq!(run_config(tmp.path(), &text).status.code(), Some(2));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn identical_systems_are_indistinguishable() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!(
        r#"{{"experiment": "boundary", "name": "same", "model": {}, "subset": {{"central": 4}}, "margins": [2, 4, 6]}}"#,
        kitaev(32)
    );
    let r = run_config(tmp.path(), &text);
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    let dir = tmp.path().join("out/boundary/same");
    let csv = std::fs::read_to_string(dir.join("boundary.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let d: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(d < 1e-10, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 3);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "pass");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn oversized_subset_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!(
        r#"{{"experiment": "boundary", "name": "big", "model": {}, "subset": {{"central": 13}}, "margins": [2]}}"#,
        kitaev(48)
    );
    let r = run_config(tmp.path(), &text);
    assert_eq!(
        r.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    let manifest =
        std::fs::read_to_string(tmp.path().join("out/boundary/big/manifest.json")).unwrap();
    assert!(manifest.contains("\"status\": \"error\""));
}

#[test]
fn repeated_runs_write_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("scan.json");
    let text = format!(
        r#"{{"experiment": "path-scan", "name": "rep", "model": {}, "grid": {{"points": 7}}}}"#,
        kitaev(12)
    );
    std::fs::write(&cfg, text).unwrap();
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        assert_eq!(
            doubling(&out, &["run", cfg.to_str().unwrap()])
                .status
                .code(),
            Some(0)
        );
        bodies.push(std::fs::read(out.join("path-scan/rep/gap.csv")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn oracle_suite_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let r = doubling(tmp.path(), &["oracle-suite", "--seed", "3"]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stdout)
    );
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 19);
    assert!(tmp.path().join("oracle-suite/seed-3/oracle.csv").exists());
}
