use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lensaoa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lensaoa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("cfg.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL: &str = r#"
trials = 40

[array]
elements = 15

[sweep]
snr_db = [0.0, 20.0]
theta_deg = [-30.0, 0.0, 30.0]
"#;

#[test]
fn every_subcommand_is_stable_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    for sub in [
        "simulate-mse",
        "simulate-outage",
        "angle-profile",
        "power-profile",
        "placement",
        "squint-map",
        "power-report",
        "bounds",
    ] {
        let mut outputs = Vec::new();
        for (i, threads) in ["1", "1", "4"].iter().enumerate() {
            let out = dir.path().join(format!("{sub}-{i}.csv"));
            let res = lensaoa(&[sub, "--config", &cfg, "--seed", "9", "--threads", threads, "--out", out.to_str().unwrap()]);
            assert!(res.status.success(), "{sub}: {}", String::from_utf8_lossy(&res.stderr));
            outputs.push(fs::read(&out).unwrap());
        }
        assert!(!outputs[0].is_empty(), "{sub} wrote nothing");
        assert_eq!(outputs[0], outputs[1], "{sub} differs between runs");
        assert_eq!(outputs[0], outputs[2], "{sub} differs between thread counts");
    }
}

#[test]
fn seed_flag_changes_monte_carlo_output() {
    let a = lensaoa(&["simulate-mse", "--trials", "30", "--seed", "1"]);
    let b = lensaoa(&["simulate-mse", "--trials", "30", "--seed", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn trials_flag_reaches_the_table() {
    let out = lensaoa(&["simulate-outage", "--trials", "17"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("snr_db,array,estimator,p_req,trials"));
    assert!(lines.all(|l| l.ends_with(",17")));
}

#[test]
fn placement_array_flag_selects_layout() {
    let uni = String::from_utf8(lensaoa(&["placement", "--array", "uniform"]).stdout).unwrap();
    let raa = String::from_utf8(lensaoa(&["placement", "--array", "raa"]).stdout).unwrap();
    assert_eq!(uni.lines().next(), Some("n,omega,x_meters,gap,squint_lo,squint_hi,lemma2_ok"));
    assert_eq!(uni.lines().count(), 22);
    assert_ne!(uni, raa);
}

#[test]
fn validate_passes_on_defaults() {
    let res = lensaoa(&["validate"]);
    let text = String::from_utf8_lossy(&res.stdout);
    assert!(res.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

#[test]
fn validate_fails_with_zero_eta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[array]\nelements = 15\neta = 0.0\n");
    let res = lensaoa(&["validate", "--config", &cfg]);
    assert_eq!(res.status.code(), Some(1));
    let text = String::from_utf8_lossy(&res.stdout);
    let failed: Vec<_> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 1, "{text}");
    assert!(failed[0].contains("coverage"));
}

#[test]
fn missing_config_is_an_explicit_error() {
    let res = lensaoa(&["simulate-mse", "--config", "/definitely/not/here.toml"]);
    assert!(!res.status.success());
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("/definitely/not/here.toml"), "{err}");
    assert!(res.stdout.is_empty());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trails = 10\n");
    let res = lensaoa(&["power-report", "--config", &cfg]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("trails"));
}

#[test]
fn invalid_values_are_rejected() {
    let res = lensaoa(&["simulate-mse", "--trials", "0"]);
    assert!(!res.status.success());
    let res = lensaoa(&["placement", "--array", "hexagonal"]);
    assert!(!res.status.success());
}
