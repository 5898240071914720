use std::process::Command;

use e91_eve::cli::{
    cmd_optimize, render_tradeoff_csv, sigma_distance, tradeoff_rows, TRADEOFF_HEADER,
};
use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_e91-eve"))
}

#[test]
fn tradeoff_three_points() {
    let rows = tradeoff_rows(0.0, 0.5, 3).unwrap();
    let csv = render_tradeoff_csv(&rows);
    assert_eq!(
        csv,
        "epsilon,p_correct,mutual_info\n0,0.5,0\n0.25,0.9330127018922193,0.6454210973347301\n0.5,1,1\n"
    );
    assert!(tradeoff_rows(0.1, 0.1, 2).is_err());
    assert!(tradeoff_rows(0.0, 0.6, 3).is_err());
    assert!(tradeoff_rows(0.3, 0.2, 3).is_err());
    assert!(tradeoff_rows(0.0, 0.5, 1).is_err());

    let rows = tradeoff_rows(0.0, 0.5, 6).unwrap();
    assert_eq!(rows[1].epsilon, 0.1);
    assert!((rows[1].p_correct - 0.8).abs() < 1e-15);
}

#[test]
fn tradeoff_command_writes_csv() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let run = bin()
        .args([
            "tradeoff",
            "--eps-min",
            "0",
            "--eps-max",
            "0.5",
            "--steps",
            "11",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], TRADEOFF_HEADER);
    assert_eq!(lines.len(), 12);
    assert!(text.ends_with('\n') && !text.contains("\r"));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 3);
        assert!(!line.ends_with(','));
    }

    let bad = bin()
        .args([
            "tradeoff",
            "--eps-min",
            "0.1",
            "--eps-max",
            "0.1",
            "--steps",
            "2",
            "--out",
        ])
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert!(!bad.status.success());
    let unwritable = bin()
        .args([
            "tradeoff",
            "--eps-min",
            "0",
            "--eps-max",
            "0.5",
            "--steps",
            "3",
            "--out",
        ])
        .arg(dir.path().join("missing/dir/x.csv"))
        .output()
        .unwrap();
    assert!(!unwritable.status.success());
}

#[test]
fn optimize_reports_closed_form_and_grid() {
    let r = cmd_optimize(0.1, 2001).unwrap();
    assert!((r.x_star - 0.81).abs() < 1e-15);
    assert!((r.p_c_closed_form - 0.8).abs() < 1e-15);
    assert!(r.grid_gap <= 1e-6);
    let r = cmd_optimize(0.0, 2001).unwrap();
    assert_eq!((r.x_star, r.p_c_closed_form), (1.0, 0.5));
    let r = cmd_optimize(0.5, 2001).unwrap();
    assert_eq!((r.x_star, r.p_c_closed_form), (0.25, 1.0));
    assert!(cmd_optimize(0.7, 2001).is_err());

    let out = bin().args(["optimize", "--eps", "0.1"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["x_star"], 0.81);
    assert!(!bin()
        .args(["optimize", "--eps", "0.9"])
        .output()
        .unwrap()
        .status
        .success());
}

#[test]
fn simulate_perfect_source() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = bin()
        .args([
            "simulate",
            "--eps",
            "0",
            "--pairs",
            "10000",
            "--disclose",
            "0.1",
            "--threshold",
            "0.11",
            "--seed",
            "5",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for key in [
        "config",
        "analytic",
        "empirical",
        "sigma_distances",
        "accept",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["empirical"]["qber_pooled"], 0.0);
    assert_eq!(v["accept"], true);
    assert!(v["sigma_distances"]["eve_success"].as_f64().unwrap() <= 4.0);
}

#[test]
fn simulate_requires_seed_and_valid_config() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("r.json");
    let no_seed = bin()
        .args(["simulate", "--eps", "0.1", "--pairs", "100", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!no_seed.status.success());
    let bad = bin()
        .args([
            "simulate",
            "--eps",
            "0.1",
            "--pairs",
            "100",
            "--disclose",
            "1.5",
            "--seed",
            "1",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn verify_passes_and_fails_at_zero_tolerance() {
    let out = bin().arg("verify").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let suites = text.lines().filter(|l| l.starts_with("PASS ")).count();
    assert!(suites >= 5, "{text}");

    let out = bin().args(["verify", "--tol", "0"]).output().unwrap();
    assert!(!out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("FAIL ") && l.contains("worst=")));
}

#[test]
fn sigma_distance_is_finite_at_boundaries() {
    assert_eq!(sigma_distance(0, 100, 0.0), Some(0.0));
    assert!(sigma_distance(1, 100, 0.0).unwrap().is_finite());
    assert_eq!(sigma_distance(0, 0, 0.3), None);
    assert!(
        (sigma_distance(30, 100, 0.25).unwrap() - 0.05 / (0.1875f64 / 100.0).sqrt()).abs() < 1e-12
    );
}
