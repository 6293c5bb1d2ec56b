use std::process::{Command, Output};

use heiscurv_core::curvature::hfamily_ratio;
use heiscurv_core::NormSpec;
use serde_json::Value;

fn heiscurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heiscurv")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn spec(s: &NormSpec) -> String {
    serde_json::to_string(s).unwrap()
}

const EUCLID: &str = r#"{"kind":"euclidean"}"#;

#[test]
fn help_and_unknown_subcommand() {
    let o = heiscurv(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("ncurv"));
    let o = heiscurv(&["frobnicate"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn malformed_input_exits_one() {
    assert_eq!(code(&heiscurv(&["trig", "--norm", r#"{"kind":"lp","params":{"p":0.5}}"#])), 1);
    assert_eq!(code(&heiscurv(&["trig", "--norm", "{not json"])), 1);
    assert_eq!(code(&heiscurv(&["trig", "--norm", "/nonexistent/spec.json"])), 1);
    assert_eq!(code(&heiscurv(&["ncurv", "--norm", EUCLID, "--grid", "32x32"])), 1);
    assert_eq!(code(&heiscurv(&["hfamily", "--h", "2"])), 1);
    // reports are JSON only
    assert_eq!(code(&heiscurv(&["--format", "csv", "mcp", "--norm", EUCLID, "--N", "6"])), 1);
}

#[test]
fn hfamily_csv_ends_at_the_closed_form() {
    let o = heiscurv(&["hfamily", "--h", "32"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,JR,wdJR,ratio"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 64);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0 / 32.0);
    assert_eq!(last[3], hfamily_ratio(32, 1.0 / 32.0).unwrap());
    assert!(rows.iter().all(|r| r.len() == 4 && r.iter().all(|v| v.is_finite())));
}

#[test]
fn trig_is_deterministic() {
    let args = ["trig", "--norm", r#"{"kind":"interpolated","params":{"q":4,"t":0.5}}"#, "--samples", "100"];
    let a = heiscurv(&args);
    let b = heiscurv(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next(), Some("theta,cosOmega,sinOmega,phi,cosPolar,sinPolar,Ccirc,CcircPrime"));
    assert_eq!(text.lines().count(), 101);
}

#[test]
fn ncurv_euclidean_reports_five() {
    let o = heiscurv(&["ncurv", "--norm", EUCLID]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["n_curv"].as_f64().unwrap() - 5.0).abs() < 5e-3);
    assert_eq!(v["band_violations"], 0);
    assert_eq!(v["grid"]["grid_s"], 512);
}

#[test]
fn check_failures_exit_two() {
    assert_eq!(code(&heiscurv(&["mcp", "--norm", EUCLID, "--N", "4.9"])), 2);
    let o = heiscurv(&["mcp", "--norm", EUCLID, "--N", "5.1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    // no witness exists for a scalar-product norm
    let diag = spec(&NormSpec::InnerProduct { matrix: [[1.0, 0.0], [0.0, 4.0]] });
    assert_eq!(code(&heiscurv(&["rigidity", "--norm", &diag])), 2);
}

#[test]
fn distance_reaches_the_vertical_point() {
    let z = (1.0 / (2.0 * std::f64::consts::PI)).to_string();
    let x = (2.0 / std::f64::consts::PI).to_string();
    let o = heiscurv(&["distance", "--norm", EUCLID, "--x", &x, "--y", "0", "--z", &z]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["distance"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geo.csv");
    let args = ["geodesic", "--norm", EUCLID, "--r", "1", "--phi", "0.3", "--omega", "-2"];
    let direct = heiscurv(&args);
    let mut with_out = vec!["--out", path.to_str().unwrap()];
    with_out.extend_from_slice(&args);
    let o = heiscurv(&with_out);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("geodesic:"));
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn config_file_sets_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "format = \"json\"\nsamples = 8\n").unwrap();
    let o = heiscurv(&["--config", cfg.to_str().unwrap(), "hfamily", "--h", "8"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
    assert!(v[7]["ratio"].is_number());

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "gird_s = 128\n").unwrap();
    assert_eq!(code(&heiscurv(&["--config", bad.to_str().unwrap(), "hfamily", "--h", "8"])), 1);
    assert_eq!(code(&heiscurv(&["--config", "/nonexistent.toml", "hfamily", "--h", "8"])), 1);
}

#[test]
fn norm_spec_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("lp.json");
    std::fs::write(&p, spec(&NormSpec::Lp { p: 3.0 })).unwrap();
    let o = heiscurv(&["jacobian", "--norm", p.to_str().unwrap(), "--grid", "4x8"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 33);
}

#[test]
fn thread_cap_is_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_heiscurv"))
            .env("HEISCURV_THREADS", v)
            .args(["hfamily", "--h", "8"])
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("2")), 0);
    assert_eq!(code(&run("zero")), 1);
    assert_eq!(code(&run("0")), 1);
}
