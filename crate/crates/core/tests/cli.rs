//! End-to-end runs of the `macrobell` binary.

use macrobell::behavior::{white_noise, Scenario};
use macrobell::io::write_behavior;
use std::f64::consts::FRAC_1_SQRT_2;
use std::process::{Command, Output};

fn macrobell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macrobell"))
        .args(args)
        .env_remove("MACROBELL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_field(o: &Output, column: &str) -> f64 {
    let text = stdout(o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    row[i].parse().unwrap()
}

#[test]
fn pr_box_outside_sign_binned_set() {
    let o = macrobell(&["membership", "pr", "--set", "qsb"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("CHSH"));
}

#[test]
fn white_noise_file_inside_q1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("noise.json");
    write_behavior(&path, &white_noise(Scenario::chsh()).unwrap()).unwrap();
    let o = macrobell(&["membership", path.to_str().unwrap(), "--set", "q1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "inside");
}

#[test]
fn analytic_set_rejects_three_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("noise2233.json");
    write_behavior(&path, &white_noise(Scenario::cglmp3()).unwrap()).unwrap();
    let o = macrobell(&["membership", path.to_str().unwrap(), "--set", "q1-analytic"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not supported"));
}

#[test]
fn malformed_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"scenario\": 3}").unwrap();
    let o = macrobell(&["membership", path.to_str().unwrap(), "--set", "local"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_three_and_help_exits_zero() {
    assert_eq!(macrobell(&["membership", "pr", "--set", "q7"]).status.code(), Some(3));
    assert_eq!(macrobell(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(macrobell(&["--help"]).status.code(), Some(0));
}

#[test]
fn chsh_line_q1_crossing_is_tsirelson() {
    let o = macrobell(&[
        "bound", "--functional", "chsh", "--far", "pr", "--base", "white_noise", "--set", "q1", "--tol", "1e-7", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!((csv_field(&o, "t_star") - FRAC_1_SQRT_2).abs() <= 1e-4);
    assert!((csv_field(&o, "value") - 2.0 * std::f64::consts::SQRT_2).abs() <= 1e-3);
}

#[test]
fn cglmp_line_local_crossing_is_one_half() {
    let o = macrobell(&[
        "bound", "--functional", "cglmp3", "--far", "generalized_pr_d3", "--base", "white_noise:2233", "--set", "local",
        "--tol", "1e-9", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!((csv_field(&o, "t_star") - 0.5).abs() <= 1e-6);
}

#[test]
fn base_outside_set_is_an_error() {
    let o = macrobell(&["bound", "--functional", "chsh", "--far", "white_noise", "--base", "pr", "--set", "local"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn simulate_reports_correlators() {
    let o = macrobell(&["simulate", "isotropic_chsh:1", "--pairs", "400", "--runs", "2000", "--format", "json", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = v["correlators"][0][0][0].as_f64().unwrap();
    assert!((c - 0.5).abs() < 0.1, "{c}");
}

fn reproduce_fig2(dir: &std::path::Path, seed: Option<&str>) -> (String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_macrobell"));
    cmd.args(["reproduce", "fig2_line", "--points", "3", "--samples", "20000", "--tol", "1e-2", "--out"])
        .arg(dir)
        .env_remove("MACROBELL_SEED");
    if let Some(s) = seed {
        cmd.env("MACROBELL_SEED", s);
    }
    let o = cmd.output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    (
        std::fs::read_to_string(dir.join("fig2_scan.csv")).unwrap(),
        std::fs::read_to_string(dir.join("fig2_crossings.csv")).unwrap(),
    )
}

#[test]
fn reproduce_is_byte_identical_and_seeded_by_environment() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let first = reproduce_fig2(a.path(), None);
    let second = reproduce_fig2(b.path(), None);
    assert_eq!(first, second);
    assert!(first.0.starts_with("t,cglmp3,local,q1,qtb,qtb_value,qtb_std_error\n"));
    assert_eq!(first.0.lines().count(), 4);
    // every number carries at least 12 significant digits
    let row: Vec<&str> = first.0.lines().nth(1).unwrap().split(',').collect();
    let mantissa = row[1].split('e').next().unwrap().replace(['-', '.'], "");
    assert!(mantissa.len() >= 12, "{}", row[1]);
    let reseeded = reproduce_fig2(c.path(), Some("17"));
    assert_ne!(first.0, reseeded.0);
}
