use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orbitk_cli::Report;
use tempfile::TempDir;

fn orbitk(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitk")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run_config(dir: &TempDir, command: &str, body: &str) -> Output {
    let cfg = write_config(dir, "run.toml", body);
    orbitk(&[command, "--config", cfg.to_str().unwrap()], dir.path())
}

const HEISENBERG: &str = r#"
[algebra]
builtin = "heisenberg"
"#;

const SMALL_CHARACTER: &str = r#"
[algebra]
builtin = "heisenberg"

[backend]
kind = "heisenberg_plane"
gamma = 1.0

[quadrature]
radius = 9.0
points_per_axis = 32

[[dictionary]]
id = "g"
center = [0.0, 0.0, 0.0]

[character]
refinement = [16, 24]
"#;

#[test]
fn check_algebra_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&dir, "check-algebra", HEISENBERG);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = Report::load(&dir.path().join("check-algebra.json")).unwrap();
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.outputs["nilpotent"], true);
    assert_eq!(r.outputs["step"], 2);
}

#[test]
fn jacobi_violation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[algebra]
names = ["e1", "e2", "e3"]
brackets = [
  { i = 1, j = 2, k = 3, value = 1.0 },
  { i = 2, j = 3, k = 1, value = 1.0 },
  { i = 1, j = 3, k = 3, value = 1.0 },
]
"#;
    let out = run_config(&dir, "check-algebra", body);
    assert_eq!(out.status.code(), Some(2));
    let r = Report::load(&dir.path().join("check-algebra.json")).unwrap();
    assert!(!r.findings.is_empty());
    assert!(r.outputs["nilpotent"].is_null());
}

#[test]
fn malformed_configs_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad_index = r#"
[algebra]
names = ["a", "b"]
brackets = [{ i = 0, j = 2, k = 1, value = 1.0 }]
"#;
    assert_eq!(run_config(&dir, "check-algebra", bad_index).status.code(), Some(3));
    let unknown = "[algebra]\nbuiltin = \"sl2\"\ncolour = 1\n";
    assert_eq!(run_config(&dir, "check-algebra", unknown).status.code(), Some(3));
    let missing = dir.path().join("absent.toml");
    let out = orbitk(&["j-relation", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(orbitk(&["no-such-command"], dir.path()).status.code(), Some(3));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(orbitk(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn character_without_backend_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&dir, "character", HEISENBERG);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gamma_zero_is_a_math_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL_CHARACTER.replace("gamma = 1.0", "gamma = 0.0");
    assert_eq!(run_config(&dir, "character", &body).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_modulo_timings() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(run_config(d, "character", SMALL_CHARACTER).status.code(), Some(0));
    }
    let load = |d: &TempDir| Report::load(&d.path().join("character.json")).unwrap().without_timings();
    assert_eq!(load(&a).to_json(), load(&b).to_json());
}

#[test]
fn emit_plotdata_from_a_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[algebra]\nbuiltin = \"sl2\"\n\n[j_relation]\ngrid_points = 5\n";
    assert_eq!(run_config(&dir, "j-relation", body).status.code(), Some(0));
    let report = dir.path().join("j-relation.json");
    let plots = dir.path().join("plots");
    fs::create_dir(&plots).unwrap();
    let out = orbitk(&["emit-plotdata", "--report", report.to_str().unwrap()], &plots);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(plots.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("w1,w2,residual,hyperbolic_residual"));
    assert_eq!(lines.count(), 25);
}

#[test]
fn emit_plotdata_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(&dir, "bad.json", "{ not json");
    let out = orbitk(&["emit-plotdata", "--report", p.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn character_records_carry_their_context() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_config(&dir, "character", SMALL_CHARACTER).status.code(), Some(0));
    let r = Report::load(&dir.path().join("character.json")).unwrap();
    let v = &r.outputs["values"][0];
    assert_eq!(v["backend"], "heisenberg_plane");
    assert_eq!(v["function_id"], "g");
    assert_eq!(v["calibration_scalar"], 1.0);
    assert_eq!(v["quadrature"]["points_per_axis"], 32);
    let exact = std::f64::consts::TAU.powf(1.5) * (-0.5f64).exp();
    assert!((v["value_re"].as_f64().unwrap() - exact).abs() < 1e-9 * exact);
    assert_eq!(v["value_im"], 0.0);
    assert_eq!(r.outputs["convergence"].as_array().unwrap().len(), 2);
    let out = orbitk(&["emit-plotdata", "--report", dir.path().join("character.json").to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("character.csv")).unwrap();
    assert!(csv.starts_with("function_id,re,im,"));
    assert_eq!(csv.lines().count(), 2);
}
