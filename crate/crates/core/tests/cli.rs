use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn tovds(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tovds"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run tovds")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const POLY: &str = r#""eos": {"type": "polytrope", "A": 1.0, "gamma": 1.5}"#;

#[test]
fn missing_gamma_is_config_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(&d, "c.json", r#"{"eos": {"type": "polytrope", "A": 1.0}, "model": {"rho_c": 0.01}}"#);
    let out = tovds(&["solve", "--config", &cfg, "--out", "o"], d.path());
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    assert!(d.path().join("o/error.json").exists());
}

#[test]
fn solve_is_byte_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(&d, "c.json", &format!(r#"{{{POLY}, "model": {{"rho_c": 0.01, "Lambda": 1e-5}}}}"#));
    for o in ["a", "b"] {
        let out = tovds(&["solve", "--config", &cfg, "--out", o], d.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(d.path().join("a/profile.csv")).unwrap();
    let b = std::fs::read(d.path().join("b/profile.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# units: geometrized"));
    assert_eq!(lines.next().unwrap(), "r,m,u,P,rho,kappa,Q,dPdr");
    let summary = std::fs::read_to_string(d.path().join("a/summary.txt")).unwrap();
    for key in ["MonotoneShort", "r_+", "m_+", "kappa_+", "Q_+", "B ="] {
        assert!(summary.contains(key), "{key}");
    }
}

#[test]
fn einstein_static_is_flagged() {
    let d = tempfile::tempdir().unwrap();
    let lambda = 4.0 * std::f64::consts::PI * (0.01 + 3.0 * 0.01f64.powf(1.5));
    let cfg = write(
        &d,
        "c.json",
        &format!(r#"{{{POLY}, "model": {{"rho_c": 0.01, "Lambda": {lambda:?}, "r_max": 2.0}}}}"#),
    );
    let out = tovds(&["solve", "--config", &cfg, "--out", "o"], d.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("constant-pressure special case detected"), "{stdout}");
}

#[test]
fn json_format_and_si_units() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        &d,
        "c.json",
        r#"{"eos": {"type": "polytrope", "A": 5.38e3, "gamma": 1.6666666666666667}, "model": {"rho_c": 1e17}}"#,
    );
    let out = tovds(&["solve", "--config", &cfg, "--out", "o", "--format", "json", "--units", "si"], d.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("o/profile.json")).unwrap()).unwrap();
    assert!(v["units"].as_str().unwrap().starts_with("SI"));
    assert_eq!(v["columns"][7], "dPdr");
}

#[test]
fn lane_emden_table() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(&d, "c.json", r#"{"lane_emden": {"mu": [1.0], "lambda": [0.0, 0.75]}}"#);
    let out = tovds(&["lane-emden", "--config", &cfg, "--out", "o"], d.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("1, 0, 3.14159265"), "{stdout}");
    assert!(stdout.contains("1, 0.75, no_zero"));
}

#[test]
fn metric_and_sweep_reports() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        &d,
        "c.json",
        &format!(
            r#"{{{POLY}, "model": {{"alpha": 0.02, "beta": 0.005}},
                "sweep": {{"alphas": [0.0, 0.01, 0.5], "betas": [0.0, 0.5, 1.0]}}}}"#
        ),
    );
    let out = tovds(&["metric", "--config", &cfg, "--out", "m", "--jobs", "2"], d.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("m/metric.json")).unwrap()).unwrap();
    assert_eq!(v["continuity"]["pass"], true);
    assert!(d.path().join("m/metric_components.csv").exists());

    let out = tovds(&["sweep", "--config", &cfg, "--out", "s"], d.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(d.path().join("s/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 9);
    assert!(d.path().join("s/sweep.json").exists());
}

#[test]
fn metric_on_non_short_model_is_numerical_failure() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(&d, "c.json", &format!(r#"{{{POLY}, "model": {{"rho_c": 0.01, "Lambda": 1.0}}}}"#));
    let out = tovds(&["metric", "--config", &cfg, "--out", "o"], d.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(tovds(&["bogus"], d.path()).status.code(), Some(2));
    assert_eq!(tovds(&["solve"], d.path()).status.code(), Some(2));
    assert_eq!(tovds(&["lane-emden", "--format", "xml"], d.path()).status.code(), Some(2));
}
