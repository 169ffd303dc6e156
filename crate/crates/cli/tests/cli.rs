use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn double_parabola() -> String {
    data("double_parabola.json").display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barrierlab")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn sweep_peaks_at_the_quasi_bound_state() {
    let p = double_parabola();
    let args = [
        "transmission",
        "--potential",
        &p,
        "--e-min",
        "0.01",
        "--e-max",
        "0.12",
        "--points",
        "500",
        "--units",
        "hartree",
    ];
    let csv = stdout(&args);
    assert_eq!(csv.lines().next(), Some("energy,transmission,reflection"));
    let best = rows(&csv).into_iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert!((best[0] - 0.06115146).abs() < 1e-6, "peak at {}", best[0]);
    assert!(best[1] > 1.0 - 1e-6);
    assert_eq!(stdout(&args), csv, "output must be byte-identical across runs");
}

#[test]
fn uniform_sweep_has_exactly_the_grid() {
    let p = double_parabola();
    let csv = stdout(&[
        "transmission",
        "--potential",
        &p,
        "--e-min",
        "0.01",
        "--e-max",
        "0.02",
        "--points",
        "11",
        "--uniform",
    ]);
    let r = rows(&csv);
    assert_eq!(r.len(), 11);
    assert_eq!(r[0][0], 0.01);
    assert_eq!(r[10][0], 0.02);
    for row in &r {
        assert!((row[1] + row[2] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn density_profile_below_resonance() {
    let p = double_parabola();
    let csv = stdout(&[
        "wavefunction",
        "--potential",
        &p,
        "--energy",
        "0.02",
        "--x-min",
        "-25",
        "--x-max",
        "25",
        "--points",
        "2000",
    ]);
    assert_eq!(csv.lines().next(), Some("x,psi_re,psi_im,density,potential"));
    let r = rows(&csv);
    assert_eq!(r.len(), 2000);
    let max_in = |lo: f64, hi: f64| r.iter().filter(|v| v[0] >= lo && v[0] <= hi).map(|v| v[3]).fold(0.0, f64::max);
    let left_barrier = max_in(-20.0, 0.0);
    assert!(left_barrier > 1.0);
    assert!(max_in(0.0, 25.0) < 1e-4 * left_barrier);
    // under-barrier decay from the left turning point inward
    assert!(max_in(-10.0, 0.0) < 1e-2 * left_barrier);
}

#[test]
fn dwell_between_first_turning_points() {
    let p = double_parabola();
    let csv = stdout(&["dwell", "--potential", &p, "--energy", "0.02", "--interval", "turning:1:2"]);
    let line: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let tau: f64 = line[5].parse().unwrap();
    assert!((tau - 11.5).abs() < 0.01 * 11.5, "tau = {tau}");
    assert_eq!(line[6], "aut");

    let json: Value = serde_json::from_str(&stdout(&[
        "dwell",
        "--potential",
        &p,
        "--energy",
        "0.02",
        "--interval",
        "-19.165,-0.835",
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(json["unit_system"], "atomic");
    assert_eq!(json["time_unit"], "aut");
    assert!((json["tau"].as_f64().unwrap() - 11.5).abs() < 0.115);
}

#[test]
fn resonance_search_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("res.json");
    let p = double_parabola();
    stdout(&[
        "resonance",
        "--potential",
        &p,
        "--e-min",
        "0.01",
        "--e-max",
        "0.12",
        "--points",
        "200",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    let json: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["unit_system"]["name"], "atomic");
    let found = json["resonances"].as_array().unwrap();
    assert_eq!(found.len(), 1);
    assert!((found[0]["energy"].as_f64().unwrap() - 0.06115146).abs() < 1e-6);
}

#[test]
fn oracle_check_agrees_and_flags_tight_tolerances() {
    let p = double_parabola();
    let base = ["oracle-check", "--potential", &p, "--e-min", "0.02", "--e-max", "0.1", "--points", "3"];
    let csv = stdout(&base);
    for r in rows(&csv) {
        assert!(r[3] < 1e-6);
    }
    let mut strict = base.to_vec();
    strict.extend(["--tolerance", "1e-30"]);
    assert_eq!(run(&strict).status.code(), Some(3));
}

#[test]
fn oracle_on_sampled_rectangle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rect.csv");
    fs::write(&path, "x,U\n-1,0\n-1,0.5\n1,0.5\n1,0\n").unwrap();
    let csv = stdout(&[
        "oracle-check",
        "--sampled",
        path.to_str().unwrap(),
        "--units",
        "natural",
        "--e-min",
        "1",
        "--e-max",
        "1",
        "--points",
        "1",
    ]);
    assert_eq!(csv.lines().next(), Some("energy,transmission,reflection,error_estimate"));
    let r = &rows(&csv)[0];
    // textbook square barrier, hbar = m = 1: E = 1, V = 0.5, width 2
    let (e, v, width) = (1.0_f64, 0.5_f64, 2.0);
    let q = (2.0 * (e - v)).sqrt();
    let exact = 1.0 / (1.0 + v * v * (q * width).sin().powi(2) / (4.0 * e * (e - v)));
    assert!((r[1] - exact).abs() < 1e-7, "{} vs {exact}", r[1]);
}

#[test]
fn unit_conversions() {
    assert_eq!(stdout(&["units", "--value", "3", "--from", "eV", "--to", "hartree"]).trim(), "0.125000000000");
    let p = double_parabola();
    let json: Value =
        serde_json::from_str(&stdout(&["units", "--potential", &p, "--energy", "0.02", "--to", "si"])).unwrap();
    assert_eq!(json["unit_system"], "si");
    assert_eq!(json["potential"]["unit_system"], "si");
    assert!((json["energy"].as_f64().unwrap() / 8e-20 - 1.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let p = double_parabola();
    let missing = run(&["dwell", "--potential", "no/such/file.json", "--energy", "0.02", "--interval", "0,1"]);
    assert_eq!(missing.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(diag["error"], "validation");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"unit_system": "atomic", "segments": [{"shape": "parabolic", "alpha": 1, "u0": 1, "width": 2}]}"#,
    )
    .unwrap();
    let out = run(&["transmission", "--potential", bad.to_str().unwrap(), "--e-min", "0.1", "--e-max", "0.2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["transmission", "--potential", &p, "--e-min", "0", "--e-max", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["dwell", "--potential", &p, "--energy", "0.02", "--interval", "turning:1:9"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["transmission", "--bogus"]).status.code(), Some(2));
}

#[test]
fn thread_cap_is_honoured() {
    let p = double_parabola();
    let args = ["transmission", "--potential", &p, "--e-min", "0.05", "--e-max", "0.07", "--points", "50"];
    let capped =
        Command::new(env!("CARGO_BIN_EXE_barrierlab")).args(args).env("BARRIERLAB_THREADS", "1").output().unwrap();
    assert!(capped.status.success());
    assert_eq!(String::from_utf8(capped.stdout).unwrap(), stdout(&args));
    let bad =
        Command::new(env!("CARGO_BIN_EXE_barrierlab")).args(args).env("BARRIERLAB_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
