use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_theta-secant"));
    c.env_remove("THETA_SECANT_CAP");
    c
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn bdhe_on_the_reference_curve_passes() {
    let out = bin().args(["check", "bdhe", "--curve", "corpus#x5m1", "--seed", "7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    let psi = r["records"].as_array().unwrap().iter().find(|x| x["name"] == "bdhe_psi").unwrap();
    assert!(psi["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn scenario_name_alone_means_check() {
    let out = bin().args(["toda", "--seed", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["config"]["seed"], 3);
}

#[test]
fn real_tau_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"scenario": "bdhe", "curve": {"kind": "genus1", "tau": [1, 0]}}"#).unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "NonPosDef");
    assert!(r["error"]["message"].as_str().unwrap().contains("PeriodMatrix"));
}

#[test]
fn out_path_gets_report_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/toda.json");
    let out = bin().args(["toda", "--out"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["config"]["scenario"], "toda");
    let csv = std::fs::read_to_string(dir.path().join("nested/toda.toda_fields.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}

#[test]
fn overrides_and_bad_input() {
    let out = bin().args(["toda", "--tol", "toda_psi=1e-20"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["toda", "--tol", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["toda", "--curve", "corpus#missing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // an impossible threshold is a failed check, not an error
    let out = bin().args(["toda", "--tol", "toda_psi=1e-16"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn radius_cap_from_environment() {
    let out = bin().arg("theta-selftest").env("THETA_SECANT_CAP", "1").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["error"]["kind"], "RadiusCap");
    let out = bin().arg("toda").env("THETA_SECANT_CAP", "many").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_particle_moves_linearly() {
    let out = bin().args(["rs", "simulate", "--n", "1", "--t-end", "1", "--h", "1e-3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1001);
    let (x0, y0, vx, vy) = (rows[0][2], rows[0][3], rows[0][4], rows[0][5]);
    for r in &rows {
        assert!((r[2] - (x0 + vx * r[0])).abs() <= 1e-12);
        assert!((r[3] - (y0 + vy * r[0])).abs() <= 1e-12);
    }
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let run = || {
        let mut r = report(&bin().args(["fay-trisecant", "--seed", "11"]).output().unwrap());
        r.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(run(), run());
}
