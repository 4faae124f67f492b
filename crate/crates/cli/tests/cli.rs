use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn smoothprog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothprog")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn sieve_counts_by_hand() {
    // 5-smooth n <= 100: 1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 16, 18, 20, 24, 25, 27, 30,
    // 32, 36, 40, 45, 48, 50, 54, 60, 64, 72, 75, 80, 81, 90, 96, 100.
    let out = smoothprog(&["sieve", "--x", "100", "--y", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "34");
    // Those congruent to 1 mod 3: 1, 4, 10, 16, 25, 40, 64, 100.
    let out = smoothprog(&["sieve", "--x", "100", "--y", "5", "--q", "3", "--a", "1"]);
    assert_eq!(stdout(&out).trim(), "8");
}

#[test]
fn exit_codes() {
    assert_eq!(smoothprog(&["sieve", "--x", "100", "--y", "5", "--a", "2"]).status.code(), Some(2));
    assert_eq!(smoothprog(&["sieve", "--x", "5e9", "--y", "5"]).status.code(), Some(4));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_smoothprog"))
        .args(["rho", "2"])
        .env("SMOOTHPROG_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn rho_at_two() {
    let out = smoothprog(&["rho", "2"]);
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let rho: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((rho - (1.0 - 2f64.ln())).abs() < 1e-12);
}

#[test]
fn first_zero_mod_four() {
    let out = smoothprog(&["lzeros", "--chi", "4:1", "--t-max", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let gammas: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("4:1,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(gammas.len(), 2);
    assert!(gammas.iter().all(|g| (g.abs() - 6.020948904697597).abs() < 1e-6));
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let config = r#"{
        "x": [1000, 10000],
        "y": {"rule": "fixed", "value": 50},
        "family": {"kind": "explicit", "moduli": [4, 9]},
        "A": 6.594885082800512,
        "D": 10,
        "T_max": 10,
        "constants": {"c1": 0.1, "c2": 0.1, "c3": 1, "C1": 10, "C2": 1, "tau_a": 2},
        "experiments": ["equidist"],
        "seed": 7
    }"#;
    let path = dir.join("config.json");
    fs::write(&path, config).unwrap();
    path
}

#[test]
fn run_bundle_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = smoothprog(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]).status;
        assert!(status.success());
    }
    let equidist = fs::read_to_string(a.join("equidist.csv")).unwrap();
    assert!(equidist.starts_with("# config: {"));
    assert_eq!(equidist.lines().filter(|l| !l.starts_with('#')).count(), 1 + 2 * 2);
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?} differs");
    }
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"x": [100], "colour": "blue"}"#).unwrap();
    let out = smoothprog(&["run", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
