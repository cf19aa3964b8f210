//! End-to-end tests of the `mbound` binary: exit-code contract, route
//! equivalence, determinism, and the headline numbers.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("mbound-test-{}-{name}", std::process::id()));
    p
}

fn json_field(text: &str, field: &str) -> f64 {
    let v: serde_json::Value = serde_json::from_str(text).expect("valid json");
    v[field].as_f64().unwrap_or(f64::NAN)
}

#[test]
fn bound_sandwich_shape() {
    let out = mbound(&[
        "bound", "-p", "2", "-q", "1.5", "--s1", "0.96", "--s2", "0.985901", "--format", "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let t = json_field(&stdout(&out), "t_sharp");
    assert!((t - 1.2).abs() < 1e-4, "t_sharp = {t}");
}

#[test]
fn bound_route_equivalence() {
    // moments of the two-step function [2 on (0, 1/4], 1 on (1/4, 1]]
    let x = 1.25f64;
    let y = 2.0f64.powf(1.5) * 0.25 + 0.75;
    let z = 1.75f64;
    let via_moments = mbound(&[
        "bound", "-p", "2", "-q", "1.5", "--x", &format!("{x:.17}"), "--y", &format!("{y:.17}"),
        "--z", &format!("{z:.17}"), "--kappa", "1", "--format", "json",
    ]);
    assert!(via_moments.status.success(), "{}", stderr(&via_moments));
    let s1 = x.powi(2) / z;
    let s2 = x.powf(1.5) / y;
    let via_shape = mbound(&[
        "bound", "-p", "2", "-q", "1.5", "--s1", &format!("{s1:.17}"), "--s2",
        &format!("{s2:.17}"), "--format", "json",
    ]);
    assert!(via_shape.status.success(), "{}", stderr(&via_shape));
    let t_m = json_field(&stdout(&via_moments), "t_sharp");
    let t_s = json_field(&stdout(&via_shape), "t_sharp");
    assert!((t_m - t_s).abs() < 1e-10, "routes differ: {t_m} vs {t_s}");
}

#[test]
fn bound_exit_codes() {
    // infeasible shape names the violated constraint
    let out = mbound(&["bound", "-p", "2", "-q", "1.5", "--s1", "0.9", "--s2", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("s1^(q-1) <= s2^(p-1)"), "{}", stderr(&out));
    // both parameter groups
    let out = mbound(&[
        "bound", "-p", "2", "-q", "1.5", "--s1", "0.5", "--s2", "0.9", "--x", "1", "--y", "1",
        "--z", "1", "--kappa", "1",
    ]);
    assert_eq!(out.status.code(), Some(64));
    // neither group
    let out = mbound(&["bound", "-p", "2", "-q", "1.5"]);
    assert_eq!(out.status.code(), Some(64));
    // unknown flag
    let out = mbound(&["bound", "-p", "2", "-q", "1.5", "--s1", "0.5", "--s2", "0.9", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(64));
    // tolerance cap
    let out = mbound(&[
        "bound", "-p", "2", "-q", "1.5", "--s1", "0.5", "--s2", "0.9", "--root-tol", "0.001",
    ]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn verify_two_step_file() {
    let file = tmp_path("two-step.json");
    std::fs::write(
        &file,
        "{\"kappa\": 1.0, \"breakpoints\": [0.25], \"values\": [2.0, 1.0]}\n",
    )
    .unwrap();
    let out = mbound(&["verify", "-p", "2", "-q", "1.5", file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("main bound"));
    assert!(text.contains("1.2260615"), "ratio missing: {text}");
    std::fs::remove_file(&file).ok();
}

#[test]
fn verify_constant_file_and_single_beta() {
    let file = tmp_path("constant.json");
    std::fs::write(&file, "{\"kappa\": 0.5, \"breakpoints\": [], \"values\": [3.0]}\n").unwrap();
    let out = mbound(&[
        "verify", "-p", "2", "-q", "1.5", file.to_str().unwrap(), "--beta", "0.7",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("ConstantBoundary"));
    std::fs::remove_file(&file).ok();
}

#[test]
fn verify_malformed_file() {
    let file = tmp_path("bad.json");
    std::fs::write(&file, "{\"kappa\": oops}").unwrap();
    let out = mbound(&["verify", "-p", "2", "-q", "1.5", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));
    std::fs::remove_file(&file).ok();
    let out = mbound(&["verify", "-p", "2", "-q", "1.5", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn sweep_eps_family_recovers_eps() {
    let out = mbound(&[
        "sweep", "-p", "2", "-q", "1.5", "--eps", "1.05:1.45:9", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s1,s2,t_sharp,t_zero,case_tag,omega_p_s1,beta_star"
    );
    for (i, line) in lines.enumerate() {
        let eps = 1.05 + 0.05 * i as f64;
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7, "row: {line}");
        let t_sharp: f64 = cols[2].parse().unwrap();
        assert!((t_sharp - eps).abs() < 1e-6, "row {i}: t_sharp = {t_sharp}");
        let ceiling: f64 = cols[5].parse().unwrap();
        assert!(t_sharp <= ceiling + 1e-8);
    }
}

#[test]
fn sweep_marks_infeasible_cells_and_is_deterministic() {
    let args = [
        "sweep", "-p", "2", "-q", "1.5", "--s1", "0.1:0.9:5", "--s2", "0.2:0.9:4", "--format",
        "csv",
    ];
    let a = mbound(&args);
    assert!(a.status.success());
    let text = stdout(&a);
    assert!(text.contains("INFEASIBLE"), "{text}");
    assert_eq!(text.lines().count(), 1 + 5 * 4);
    let b = mbound(&args);
    assert_eq!(stdout(&a), stdout(&b), "sweep output not deterministic");
    // degenerate 1x1 grid
    let out = mbound(&[
        "sweep", "-p", "2", "-q", "1.5", "--s1", "0.5", "--s2", "0.9", "--format", "csv",
    ]);
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn extremal_construction_and_inversion() {
    let out = mbound(&[
        "extremal", "-p", "2", "-q", "1.5", "--eps", "1.2", "--kappa", "1", "--f", "1.2",
        "--format", "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!((json_field(&text, "theta") - 1.0).abs() < 1e-12);
    assert!((json_field(&text, "s1") - 0.96).abs() < 1e-12);
    let residual = json_field(&text, "equality_residual");
    assert!(residual.abs() < 1e-10, "equality residual {residual}");

    let out = mbound(&[
        "extremal", "-p", "2", "-q", "1.5", "--from-moments", "--f", "1.2", "--A",
        "1.3333333333333333", "--F", "1.5", "--format", "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!((json_field(&text, "kappa0") - 1.0).abs() < 1e-6);
    assert!((json_field(&text, "eps0") - 1.2).abs() < 1e-6);
}

#[test]
fn search_writes_function_and_is_deterministic() {
    let file = tmp_path("best.json");
    let args = [
        "search", "-p", "2", "-q", "1.5", "--s1", "0.5", "--s2", "0.9", "--n-steps", "8",
        "--iters", "60", "--seed", "4", "--format", "json", "--function-file",
        file.to_str().unwrap(),
    ];
    let a = mbound(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    let first = std::fs::read_to_string(&file).unwrap();
    let b = mbound(&args);
    let second = std::fs::read_to_string(&file).unwrap();
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(first, second, "function file not byte-identical");
    let ratio = json_field(&stdout(&a), "best_ratio");
    let t_sharp = json_field(&stdout(&a), "t_sharp");
    assert!(ratio <= t_sharp + 1e-9);
    std::fs::remove_file(&file).ok();

    // single-step search on an interior shape fails with the search code
    let out = mbound(&[
        "search", "-p", "2", "-q", "1.5", "--s1", "0.5", "--s2", "0.9", "--n-steps", "1",
        "--iters", "10", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn thread_cap_env_var() {
    let out = Command::new(env!("CARGO_BIN_EXE_mbound"))
        .args(["bound", "-p", "2", "-q", "1.5", "--s1", "0.5", "--s2", "0.9"])
        .env("MBOUND_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_mbound"))
        .args(["bound", "-p", "2", "-q", "1.5", "--s1", "0.5", "--s2", "0.9"])
        .env("MBOUND_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn help_exits_zero() {
    let out = mbound(&["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("sweep"));
}
