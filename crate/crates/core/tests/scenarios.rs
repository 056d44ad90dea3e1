use theta_secant::scenario::{run_scenario, Report, Scenario, ScenarioConfig};

fn without_timing(r: &Report) -> String {
    let mut r = r.clone();
    r.timing = 0.0;
    r.to_json()
}

#[test]
fn identical_configs_give_identical_reports() {
    for s in [Scenario::FayTrisecant, Scenario::RsDynamics] {
        let mut cfg = ScenarioConfig::new(s);
        cfg.seed = 19;
        let (a, b) = (run_scenario(&cfg), run_scenario(&cfg));
        assert_eq!(without_timing(&a.report), without_timing(&b.report));
        assert_eq!(a.artifacts, b.artifacts);
    }
}

#[test]
fn reports_round_trip_through_json() {
    let out = run_scenario(&ScenarioConfig::new(Scenario::Bdhe));
    let json = out.report.to_json();
    let back: Report = serde_json::from_str(&json).unwrap();
    assert_eq!(back, out.report);
    assert_eq!(back.to_json(), json);
}

#[test]
fn configs_round_trip_and_drive_thresholds() {
    let json = r#"{
        "scenario": "toda",
        "curve": {"kind": "genus1", "tau": [0.1, 1.2]},
        "seed": 4,
        "tolerances": {"toda_psi": 1e-9},
        "sizes": {"window": 6}
    }"#;
    let cfg = ScenarioConfig::from_json(json).unwrap();
    let again = ScenarioConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(cfg, again);
    let out = run_scenario(&cfg);
    assert_eq!(out.report.exit_code(), 0, "{}", out.report.to_json());
    let psi = out.report.records.iter().find(|r| r.name == "toda_psi").unwrap();
    assert_eq!(psi.threshold, 1e-9);
    let rows = out.artifacts[0].csv.lines().count();
    assert!(rows > 6 * 6);
}

#[test]
fn seeds_change_the_draws() {
    let run = |seed| {
        let mut cfg = ScenarioConfig::new(Scenario::FayTrisecant);
        cfg.seed = seed;
        run_scenario(&cfg).report.records[0].residual
    };
    assert_ne!(run(1), run(2));
}

#[test]
fn radius_cap_failures_are_numerical_errors() {
    let mut cfg = ScenarioConfig::new(Scenario::Bdhe);
    cfg.radius_cap = Some(1);
    let out = run_scenario(&cfg);
    assert_eq!(out.report.exit_code(), 3);
    assert_eq!(out.report.error.unwrap().kind, "RadiusCap");
}
