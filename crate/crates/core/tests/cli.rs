use std::path::PathBuf;
use std::process::{Command, Output};

use ctm_zeta::spectra::{build_torus_transition, torus_spectrum, TorusSpec};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctm-zeta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses CSV output into (header, rows).
fn table(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], row: &[String], name: &str) -> f64 {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("{name}"));
    row[i].parse().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ctm-zeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn spectrum_of_small_tori() {
    let out = run(&["spectrum", "--torus", "1,4"]);
    assert!(out.status.success());
    let (header, rows) = table(&out);
    let got: Vec<f64> = rows.iter().map(|r| column(&header, r, "lambda_re")).collect();
    assert_eq!(got, vec![1.0, 0.0, -1.0, 0.0]);

    let (header, rows) = table(&run(&["spectrum", "--torus", "2,2"]));
    let got: Vec<f64> = rows.iter().map(|r| column(&header, r, "lambda_re")).collect();
    assert_eq!(got, vec![1.0, 0.0, 0.0, -1.0]);
}

#[test]
fn spectrum_from_matrix_file() {
    let spec = TorusSpec::new(1, 5).unwrap();
    let path = scratch("cycle5.csv");
    let mut buf = Vec::new();
    build_torus_transition(&spec).unwrap().write_csv(&mut buf).unwrap();
    std::fs::write(&path, buf).unwrap();

    let out = run(&["spectrum", "--matrix", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = table(&out);
    let closed = torus_spectrum(&spec);
    assert_eq!(rows.len(), 5);
    for (row, want) in rows.iter().zip(closed.values()) {
        assert!((column(&header, row, "lambda_re") - want.re).abs() < 1e-12);
        assert!(column(&header, row, "lambda_im").abs() < 1e-12);
    }
}

#[test]
fn zeta_trivial_rows_and_residual() {
    let (header, rows) = table(&run(&["zeta", "--torus", "1,8", "--u", "0,0"]));
    assert_eq!(column(&header, &rows[0], "zeta_inverse_re"), 1.0);

    let (header, rows) = table(&run(&["zeta", "--torus", "1,8", "--t", "0", "--u", "0.5,0"]));
    assert!((column(&header, &rows[0], "zeta_inverse_re") - 0.5).abs() < 1e-15);

    let out = run(&["zeta", "--torus", "1,8", "--xi", "0", "--t", "1", "--u", "0.3,0"]);
    assert!(out.status.success());
    let (header, rows) = table(&out);
    assert!(column(&header, &rows[0], "residual") <= 1e-9);
}

#[test]
fn zeta_radius_violation_is_a_row_error() {
    let out = run(&["zeta", "--torus", "1,4", "--u", "0.5,0;2,0;0.25,0"]);
    assert_eq!(out.status.code(), Some(1));
    let (header, rows) = table(&out);
    assert_eq!(rows.len(), 3);
    let err = header.iter().position(|h| h == "error").unwrap();
    assert!(rows[0][err].is_empty());
    assert!(!rows[1][err].is_empty());
    assert!(rows[2][err].is_empty());
}

#[test]
fn coeff_columns_agree() {
    let out = run(&["coeff", "--torus", "1,256", "--xi", "0", "--t", "1", "--r", "1"]);
    assert!(out.status.success());
    let (header, rows) = table(&out);
    let finite = column(&header, &rows[0], "finite_re");
    let limit = column(&header, &rows[0], "limit_re");
    let closed = column(&header, &rows[0], "closed_form_re");
    assert!((finite - limit).abs() < 1e-10);
    assert!((finite - closed).abs() < 1e-10);
}

#[test]
fn walk_at_time_zero() {
    let out = run(&["walk", "ctrw", "--t", "0"]);
    assert!(out.status.success());
    let (_, rows) = table(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn verify_quick_exits_zero() {
    let out = run(&["verify", "quick"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn json_carries_schema_version() {
    let out = run(&["zeta", "--torus", "2,4", "--xi", "quantum", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema_version"], "1");
    assert_eq!(doc["command"], "zeta");
    assert!(doc["rows"][0]["zeta_inverse"].is_array());
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("spectrum.csv");
    let out = run(&["spectrum", "--torus", "1,4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("index,"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["zeta", "--torus", "1,4", "--u", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--matrix", "/nonexistent/m.csv"]).status.code(), Some(2));
    assert_eq!(run(&["zeta", "--torus", "1,4", "--xi", "3"]).status.code(), Some(2));
    assert_eq!(run(&["coeff", "--torus", "1,4", "--t=-1"]).status.code(), Some(2));
}
