//! End-to-end tests of the command-line interface through the compiled
//! binary: determinism, exit codes, and file emission.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn maxlim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxlim"))
        .args(args)
        .current_dir(dir)
        .env_remove("MAXLIM_DEFAULTS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn write_config(dir: &Path, n: usize, reps: usize) -> String {
    let path = dir.join("config.json");
    fs::write(
        &path,
        format!(
            r#"{{"model": {{"kind": "iid", "law": {{"kind": "frechet", "alpha": 1.0}}}},
                "n": {n}, "reps": {reps}, "seed": 11}}"#
        ),
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_is_deterministic_in_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = maxlim(&["simulate", "--n", "500", "--seed", "3"], dir.path());
    let b = maxlim(&["simulate", "--n", "500", "--seed", "3"], dir.path());
    let c = maxlim(&["simulate", "--n", "500", "--seed", "4"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "same seed must give byte-identical output");
    assert_ne!(a.stdout, c.stdout, "different seeds must differ");
    assert!(stdout(&a).starts_with("# model:"), "csv header comment expected");
}

#[test]
fn metric_of_a_path_with_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    fs::write(&path, r#"{"initial": 0.0, "jumps": [[0.25, 1.0], [0.75, 0.5]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let out = maxlim(&["metric", "--j1", p, p], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0");
    // several metrics at once are labeled
    let labeled = maxlim(&["metric", "--j1", "--oscillation", "0.6", p, p], dir.path());
    let text = stdout(&labeled);
    assert!(text.contains("j1 0") && text.contains("oscillation 0.5"), "got: {text}");
}

#[test]
fn verify_passes_on_defaults_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 2000, 2000);
    let out_dir = dir.path().join("run");
    let out = maxlim(
        &["verify", "--config", &config, "--output", out_dir.to_str().unwrap(), "--format", "csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("name,statistic,threshold,passed,seed"), "got: {text}");
    assert!(text.contains("endpoint_limit") && text.contains("tightness"));
    for file in ["reports.json", "summary.csv", "manifest.json", "config.json"] {
        assert!(out_dir.join(file).exists(), "{file} missing");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"model": "nope"}"#).unwrap();
    let out = maxlim(&["verify", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty(), "an error message is expected");
    let missing = maxlim(&["verify", "--config", "/nonexistent.json"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    let usage = maxlim(&["frobnicate"], dir.path());
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 500, 200);
    let defaults_path = dir.path().join("strict.json");
    fs::write(
        &defaults_path,
        r#"{"endpoint_ks": 1e-9, "endpoint_ks_slow": 1e-9, "fdd_abs": 1e-9,
            "tightness_ratio": 1e-9, "counts_tv": 1e-9, "marks_ks": 1e-9,
            "implied_tail": 1e-9, "laplace_gap": 1e-9}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_maxlim"))
        .args(["verify", "--config", &config])
        .env("MAXLIM_DEFAULTS", &defaults_path)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "impossible thresholds must fail checks");
}

#[test]
fn calibrate_writes_the_defaults_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 1000, 300);
    let defaults_path = dir.path().join("calibrated.json");
    let out = Command::new(env!("CARGO_BIN_EXE_maxlim"))
        .args(["calibrate", "--rounds", "2", "--config", &config])
        .env("MAXLIM_DEFAULTS", &defaults_path)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let table: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&defaults_path).unwrap()).unwrap();
    assert!(table["endpoint_ks_slow"].as_f64().unwrap() >= 0.07);
}

#[test]
fn estimate_emits_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 5000, 100);
    let out = maxlim(
        &["estimate", "--estimator", "hill", "--k", "200", "--config", &config],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let est: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let alpha = est["value"].as_f64().unwrap();
    assert!((0.7..=1.3).contains(&alpha), "hill estimate {alpha}");
    assert_eq!(est["tuning"]["k"], 200);
}

#[test]
fn maxima_emits_both_paths() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 1000, 10);
    let out = maxlim(&["maxima", "--u", "0.4", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["full"]["jumps"].is_array());
    assert!(doc["truncated"]["jumps"].is_array());
    assert!(doc["a_n"].as_f64().unwrap() > 0.0);
}
