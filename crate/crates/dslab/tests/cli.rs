use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dslab::commands::{FvReport, ProfileReport, SolveReport, VerifyReport};
use dslab_core::riemann::ShockState;
use dslab_core::vanishing::SweepReport;
use serde::de::DeserializeOwned;
use tempfile::TempDir;

const DROPLET: &str =
    r#""problem": {"v_minus": 4.0, "v_plus": 1.0, "u_minus": 2.0, "u_plus": 0.0, "alpha": 1.0, "k": 1}"#;

fn write_config(dir: &TempDir, body: &str) -> PathBuf {
    let path = dir.path().join("config.json");
    fs::write(&path, body).unwrap();
    path
}

fn dslab(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dslab"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn parse<T: DeserializeOwned>(path: &Path) -> T {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_writes_droplet_parameters() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &format!("{{{DROPLET}}}"));
    let out = dir.path().join("out");
    let o = dslab(&["solve", "--format", "json"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: SolveReport = parse(&out.join("solve.json"));
    assert!((report.params.sigma - 4.0 / 3.0).abs() < 1e-14);
    assert!((report.params.w0 - 4.0).abs() < 1e-14);
    assert!((report.params.u_delta - 4.0 / 3.0).abs() < 1e-14);
    assert!(report.rh_max.iter().all(|r| *r < 1e-12));
}

#[test]
fn non_compressive_data_exit_4() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"problem": {"v_minus": 1.0, "v_plus": 1.0, "u_minus": 0.0, "u_plus": 1.0, "alpha": 1.0, "k": 1}}"#,
    );
    let o = dslab(&["solve"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("u_minus > u_plus"));
}

#[test]
fn validation_failures_exit_2() {
    let dir = TempDir::new().unwrap();
    let cases = [
        format!(r#"{{{DROPLET}, "surprise": true}}"#),
        format!(r#"{{{DROPLET}}}"#),
        format!(r#"{{{DROPLET}, "fv": {{"simulation": {{"x_lo": -1.0, "x_hi": 1.0, "cells": 4, "t_end": 1.0}}}}}}"#),
        r#"{"problem": {"v_minus": -1.0, "v_plus": 1.0, "u_minus": 1.0, "u_plus": 0.0, "alpha": 1.0, "k": 1}}"#.into(),
        r#"{"problem": {"v_minus": 1.0, "v_plus": 1.0, "u_minus": 1.0, "u_plus": 0.0, "alpha": 1.0, "k": 2}}"#.into(),
    ];
    let commands = ["solve", "profile", "fv", "solve", "solve"];
    for (body, command) in cases.iter().zip(commands) {
        let cfg = write_config(&dir, body);
        let o = dslab(&[command], &cfg, dir.path());
        assert_eq!(
            o.status.code(),
            Some(2),
            "{body}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let o = dslab(&["solve"], &dir.path().join("nope.json"), dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failure_exit_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        &format!(r#"{{{DROPLET}, "profile": {{"epsilon": 0.1, "fp_max_iter": 0}}}}"#),
    );
    let o = dslab(&["profile"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn symmetric_sweep_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"problem": {"v_minus": 1.0, "v_plus": 1.0, "u_minus": 1.0, "u_plus": -1.0, "alpha": 1.0, "k": 1},
            "sweep": {"epsilons": [0.2, 0.1, 0.05], "eta": 0.5}}"#,
    );
    let out = dir.path().join("sweep");
    let o = dslab(&["sweep"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epsilon,xi_sigma,dev_left,dev_right,weight,momentum_weight"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for w in rows.windows(2) {
        assert!(w[1][2] < w[0][2] && w[1][3] < w[0][3]);
    }
}

#[test]
fn json_outputs_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        &format!(
            r#"{{{DROPLET},
            "times": {{"t_end": 2.0, "samples": 11}},
            "profile": {{"epsilon": 0.2, "grid": {{"kind": "uniform", "nodes": 801}}}},
            "sweep": {{"epsilons": [0.2, 0.1], "profile": {{"grid": {{"kind": "graded", "nodes": 801}}}}}},
            "fv": {{"simulation": {{"x_lo": -2.0, "x_hi": 2.0, "cells": 200, "t_end": 0.5}}}},
            "verify": {{"count": 2, "seed": 3}},
            "output": {{"format": "json"}}}}"#
        ),
    );
    let out = dir.path().join("json");
    for command in ["solve", "trajectory", "profile", "sweep", "fv", "verify"] {
        let o = dslab(&[command], &cfg, &out);
        assert!(o.status.success(), "{command}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let _: SolveReport = parse(&out.join("solve.json"));
    let states: Vec<ShockState<f64>> = parse(&out.join("trajectory.json"));
    assert_eq!(states.len(), 11);
    let profile: ProfileReport = parse(&out.join("profile.json"));
    assert_eq!(profile.xi.len(), 801);
    let sweep: SweepReport<f64> = parse(&out.join("sweep.json"));
    assert_eq!(sweep.records.len(), 2);
    let fv: FvReport = parse(&out.join("fv.json"));
    assert!(fv.comparison.is_some());
    let verify: VerifyReport = parse(&out.join("verify.json"));
    assert_eq!(verify.rows.len(), 2);
    // Re-serializing a parsed report reproduces the file.
    let again = serde_json::to_string_pretty(&verify).unwrap() + "\n";
    assert_eq!(again, fs::read_to_string(out.join("verify.json")).unwrap());
}

#[test]
fn flags_override_the_file() {
    let dir = TempDir::new().unwrap();
    let elsewhere = dir.path().join("from-config");
    let cfg = write_config(
        &dir,
        &format!(
            r#"{{{DROPLET}, "output": {{"dir": "{}", "format": "json"}}}}"#,
            elsewhere.display()
        ),
    );
    let out = dir.path().join("from-flag");
    let o = dslab(&["trajectory", "--format", "csv"], &cfg, &out);
    assert!(o.status.success());
    assert!(out.join("trajectory.csv").exists());
    assert!(!elsewhere.exists());
    let header = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(header.starts_with("t,x,w,u_front\n"));
}

#[test]
fn verify_accepts_explicit_test_functions() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        &format!(
            r#"{{{DROPLET}, "verify": {{"test_functions": [
                {{"terms": [{{"amplitude": 1.0,
                             "x": {{"kind": "bump", "center": 0.8, "width": 0.6}},
                             "t": {{"kind": "bump", "center": 1.0, "width": 0.4}}}}]}}
            ]}}}}"#
        ),
    );
    let o = dslab(&["verify"], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);

    let cfg = write_config(
        &dir,
        &format!(
            r#"{{{DROPLET}, "verify": {{"test_functions": [
                {{"terms": [{{"amplitude": 1.0,
                             "x": {{"kind": "bump", "center": 0.0, "width": 0.6}},
                             "t": {{"kind": "bump", "center": 0.2, "width": 0.4}}}}]}}
            ]}}}}"#
        ),
    );
    let o = dslab(&["verify"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn command_can_come_from_the_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &format!(r#"{{"command": "solve", {DROPLET}}}"#));
    let o = dslab(&[], &cfg, dir.path());
    assert!(o.status.success());
    assert!(dir.path().join("solve.csv").exists());
    // The positional command wins.
    let o = dslab(&["trajectory"], &cfg, dir.path());
    assert!(o.status.success());
    assert!(dir.path().join("trajectory.csv").exists());

    let cfg = write_config(&dir, &format!("{{{DROPLET}}}"));
    assert_eq!(dslab(&[], &cfg, dir.path()).status.code(), Some(2));
}
