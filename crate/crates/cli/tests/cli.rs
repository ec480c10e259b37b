use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_shockcost"));
    c.env_remove("SHOCKCOST_QUAD_TOL");
    c
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &str, scenario: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(cmd)
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn results(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap()
}

const SHOCK: &str = r#"{
  "model": {"builtin": "burgers"},
  "profile": {"breakpoints": [0.25, 0.75], "values": [1.0, 0.0]},
  "params": {"t": 1.0, "policy": "single_shock"}
}"#;

const SWEEP: &str = r#"{
  "command": "sweep",
  "model": {"builtin": "cubic"},
  "profile": {"file": "wave.json"},
  "params": {"kind": "split", "m_values": [4, 8, 16, 32, 64], "t_bar": 1.0, "m": 0.0}
}"#;

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "bad.json", "{\"model\": ");
    let o = run("cost", &sc, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mismatch = write(dir.path(), "a.json", r#"{"command": "absorber", "model": {"builtin": "cubic"}}"#);
    assert_eq!(run("cost", &mismatch, &out, &[]).status.code(), Some(2));
    let missing = write(
        dir.path(),
        "b.json",
        r#"{"model": {"builtin": "cubic"}, "profile": {"file": "nowhere.json"}, "params": {"t": 1}}"#,
    );
    assert_eq!(run("evolve", &missing, &out, &[]).status.code(), Some(2));
    let unknown = write(dir.path(), "c.json", r#"{"model": {"builtin": "cubic"}, "extra": 1}"#);
    assert_eq!(run("evolve", &unknown, &out, &[]).status.code(), Some(2));
    let wide = write(
        dir.path(),
        "d.json",
        r#"{"model": {"builtin": "cubic"}, "params": {"m": 0, "d1": 0.6, "d2": 0.2}}"#,
    );
    assert_eq!(run("absorber", &wide, &out, &[]).status.code(), Some(2));
    assert_eq!(results(&out)["exit_code"], 2);
}

#[test]
fn unreached_decay_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(
        dir.path(),
        "s.json",
        r#"{"model": {"builtin": "cubic"},
            "profile": {"breakpoints": [0.0, 0.5], "values": [0.2, -0.2]},
            "params": {"d1": 0.05, "d2": 0.0225, "delta": 0.005, "m_split": 8, "mesh": 0.05}}"#,
    );
    let out = dir.path().join("out");
    let o = run("quasipotential", &sc, &out, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(results(&out)["exit_code"], 3);
}

#[test]
fn anti_entropic_shock_costs_a_twelfth() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "s.json", SHOCK);
    let out = dir.path().join("out");
    let o = run("cost", &sc, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = results(&out);
    let h = r["summary"]["h_total"].as_f64().unwrap();
    let jv = r["summary"]["jv_total"].as_f64().unwrap();
    assert!((h - 1.0 / 12.0).abs() < 1e-9);
    assert!((jv - h).abs() < 1e-9);
    assert_eq!(r["weak_check"]["passes"], true);
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), 3);
    assert!(traj.contains("anti_entropic"));
    assert!(!out.join("diagram.svg").exists());
}

#[test]
fn split_sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "wave.json", r#"{"breakpoints": [0.0, 0.5], "values": [0.2, -0.2]}"#);
    let sc = write(dir.path(), "s.json", SWEEP);
    let out = dir.path().join("out");
    let o = run("sweep", &sc, &out, &["--jobs", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let slope_col = headers.iter().position(|h| h == "fitted_slope").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for r in &rows {
        let slope: f64 = r[slope_col].parse().unwrap();
        assert!((-2.4..=-1.6).contains(&slope), "slope {slope}");
        let m: usize = r[0].parse().unwrap();
        let anti: usize = r[3].parse().unwrap();
        assert!(anti <= 3 * m);
    }
    let slope = results(&out)["summary"]["fitted_slope"].as_f64().unwrap();
    assert!((slope + 2.0).abs() < 0.05);
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "wave.json", r#"{"breakpoints": [0.0, 0.5], "values": [0.2, -0.2]}"#);
    let sweep = write(dir.path(), "sweep.json", SWEEP);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("sweep", &sweep, &a, &["--jobs", "1"]).status.success());
    assert!(run("sweep", &sweep, &b, &["--jobs", "4"]).status.success());
    assert_eq!(snapshot(&a), snapshot(&b));

    let split = write(
        dir.path(),
        "split.json",
        r#"{"model": {"builtin": "cubic"}, "profile": {"file": "wave.json"},
            "params": {"t_bar": 1.0, "m_split": 8}}"#,
    );
    let (c, d) = (dir.path().join("c"), dir.path().join("d"));
    assert!(run("split-evolve", &split, &c, &["--svg"]).status.success());
    assert!(run("split-evolve", &split, &d, &["--svg"]).status.success());
    let snap = snapshot(&c);
    assert_eq!(snap.len(), 3);
    assert_eq!(snap, snapshot(&d));
}

#[test]
fn written_solution_prices_identically() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(
        dir.path(),
        "evolve.json",
        r#"{"model": {"builtin": "cubic"},
            "profile": {"breakpoints": [0.1, 0.4, 0.7], "values": [0.3, -0.1, 0.05]},
            "params": {"t": 0.8, "policy": "entropic", "mesh": 0.02}}"#,
    );
    let first = dir.path().join("first");
    assert!(run("evolve", &sc, &first, &[]).status.success());
    let again = write(
        dir.path(),
        "cost.json",
        r#"{"params": {"solution": "first/results.json"}}"#,
    );
    let second = dir.path().join("second");
    let o = run("cost", &again, &second, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (r1, r2) = (results(&first), results(&second));
    assert_eq!(r1["solution"], r2["solution"]);
    assert_eq!(r1["cost"], r2["cost"]);
    let body = |dir: &Path| -> Vec<String> {
        fs::read_to_string(dir.join("trajectory.csv"))
            .unwrap()
            .lines()
            .map(|l| l.split_once(',').unwrap().1.to_string())
            .collect()
    };
    assert_eq!(body(&first), body(&second));
}

#[test]
fn reverse_balances_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(
        dir.path(),
        "s.json",
        r#"{"model": {"builtin": "burgers"},
            "profile": {"breakpoints": [0.0, 0.3, 0.6], "values": [0.7, 0.2, 0.5]},
            "params": {"t": 0.5, "policy": "single_shock"}}"#,
    );
    let out = dir.path().join("out");
    assert!(run("reverse", &sc, &out, &["--svg"]).status.success());
    let r = results(&out);
    assert!(r["summary"]["identity_residual"].as_f64().unwrap().abs() < 1e-9);
    assert!(out.join("diagram.svg").exists());
}

#[test]
fn quad_tol_environment_override() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(
        dir.path(),
        "s.json",
        r#"{"model": {"builtin": "burgers", "quad_tol": 1e-9},
            "profile": {"breakpoints": [0.25, 0.75], "values": [1.0, 0.0]},
            "params": {"t": 1.0, "policy": "single_shock"},
            "tolerances": {"quad_tol": 1e-11}}"#,
    );
    let out = dir.path().join("out");
    assert!(run("cost", &sc, &out, &[]).status.success());
    assert_eq!(results(&out)["model"]["quad_tol"].as_f64(), Some(1e-11));

    let o = bin()
        .env("SHOCKCOST_QUAD_TOL", "1e-6")
        .args(["cost", "--scenario"])
        .arg(&sc)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(results(&out)["model"]["quad_tol"].as_f64(), Some(1e-6));

    let o = bin()
        .env("SHOCKCOST_QUAD_TOL", "tight")
        .args(["cost", "--scenario"])
        .arg(&sc)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_command_is_rejected() {
    let o = bin().args(["frobnicate", "--scenario", "x.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
