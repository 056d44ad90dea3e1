//! One line per acceptance criterion. Thresholds are pinned here and compared
//! with the raw residuals, independently of the scenario defaults.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use theta_secant::divisor::{residual_cm7d, DivisorSample};
use theta_secant::scenario::{run_scenario, Report, Scenario, ScenarioConfig};
use theta_secant::theta::PeriodMatrix;
use theta_secant::{rng, CVector};

const SEED: u64 = 7;

enum Check {
    AtMost(&'static str, f64),
    AtLeast(&'static str, f64),
}

struct Criterion {
    lines: Vec<String>,
    pass: bool,
}

impl Criterion {
    fn new() -> Self {
        Criterion { lines: Vec::new(), pass: true }
    }

    fn value(&mut self, label: &str, value: f64, check: Check) {
        let (ok, text) = match check {
            Check::AtMost(_, t) => (value <= t, format!("{label} {value:.3e} <= {t:e}")),
            Check::AtLeast(_, t) => (value >= t, format!("{label} {value:.3e} >= {t:e}")),
        };
        self.pass &= ok && value.is_finite();
        self.lines.push(text);
    }

    fn record(&mut self, report: &Report, check: Check) {
        let name = match check {
            Check::AtMost(n, _) | Check::AtLeast(n, _) => n,
        };
        match report.records.iter().find(|r| r.name == name) {
            Some(r) => self.value(&format!("{}/{name}", report.config.scenario), r.residual, check),
            None => {
                self.pass = false;
                let why = report.error.as_ref().map_or("missing".to_string(), |e| format!("{}: {}", e.kind, e.message));
                self.lines.push(format!("{}/{name} not produced ({why})", report.config.scenario));
            }
        }
    }

    fn seconds(&mut self, label: &str, seconds: f64, limit: f64) {
        self.pass &= seconds < limit;
        self.lines.push(format!("{label} {seconds:.1} s < {limit} s"));
    }
}

fn run(s: Scenario) -> Report {
    let mut cfg = ScenarioConfig::new(s);
    cfg.seed = SEED;
    run_scenario(&cfg).report
}

fn genus_one_identity() -> f64 {
    let b = PeriodMatrix::from_rows(1, &[Complex64::new(0.0, 1.0)]).unwrap();
    let half = DivisorSample {
        z: CVector::from_element(1, Complex64::new(0.5, 0.5)),
        theta_abs: 0.0,
        line_seed: 0,
    };
    let mut r = rng::seeded(SEED);
    (0..20)
        .map(|_| {
            let u = rng::complex_vector(&mut r, 1, 0.5);
            let v = rng::complex_vector(&mut r, 1, 0.5);
            residual_cm7d(&half, &u, &v, &b).unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

fn main() -> ExitCode {
    use Check::*;
    let wall = Instant::now();
    let mut criteria: Vec<(u32, Criterion)> = Vec::new();
    let mut push = |n: u32, c: Criterion| criteria.push((n, c));

    let t = Instant::now();
    let selftest = run(Scenario::ThetaSelftest);
    let mut c = Criterion::new();
    c.record(&selftest, AtMost("evenness", 1e-12));
    c.record(&selftest, AtMost("quasi_periodicity", 1e-10));
    c.record(&selftest, AtMost("radius_stability", 1e-12));
    c.record(&selftest, AtMost("fd_first", 1e-6));
    c.record(&selftest, AtMost("fd_second", 1e-4));
    c.seconds("1000 samples in", t.elapsed().as_secs_f64(), 30.0);
    push(1, c);

    let mut c = Criterion::new();
    c.value("genus-1 three-term identity at (1+B)/2, 20 pairs", genus_one_identity(), AtMost("", 1e-10));
    push(2, c);

    let t = Instant::now();
    let fay = run(Scenario::FayTrisecant);
    let mut c = Criterion::new();
    c.record(&fay, AtMost("discrete_fit", 1e-8));
    c.record(&fay, AtLeast("random_control", 1e-2));
    c.record(&fay, AtLeast("gap", 1e4));
    c.seconds("with quadrature in", t.elapsed().as_secs_f64(), 120.0);
    push(3, c);

    let bdhe = run(Scenario::Bdhe);
    let mut c = Criterion::new();
    c.record(&bdhe, AtMost("bdhe_psi", 1e-8));
    c.record(&bdhe, AtMost("constants_consistency", 1e-6));
    push(4, c);

    let divisor = run(Scenario::DivisorIdentities);
    let mut c = Criterion::new();
    c.record(&divisor, AtMost("cm7d", 1e-8));
    c.record(&divisor, AtLeast("decomposable_control", 1e-2));
    push(5, c);

    // toda and divisor-identities draw the same first tuple from the seed
    let toda = run(Scenario::Toda);
    let mut c = Criterion::new();
    c.record(&toda, AtMost("semidiscrete_fit", 1e-7));
    c.record(&toda, AtMost("toda_psi", 1e-6));
    c.record(&divisor, AtMost("cm7", 1e-7));
    push(6, c);

    let rs = run(Scenario::RsDynamics);
    let mut c = Criterion::new();
    c.record(&rs, AtMost("cm5", 1e-6));
    c.record(&rs, AtLeast("cm5_control", 1e-2));
    push(7, c);

    let mut c = Criterion::new();
    c.record(&rs, AtMost("conservation_rational", 1e-9));
    c.record(&rs, AtMost("tracking_agreement", 1e-5));
    push(8, c);

    let wave = run(Scenario::WaveSeries);
    let mut c = Criterion::new();
    c.record(&wave, AtMost("f2d_genus1", 1e-8));
    c.record(&wave, AtMost("f2d_genus2", 1e-7));
    push(9, c);

    let mut c = Criterion::new();
    c.record(&wave, AtMost("residue", 1e-8));
    c.record(&divisor, AtLeast("singular_locus_probe", 1e-3));
    push(10, c);

    // the controls scenario completes the suite before the clock is read
    let controls = run(Scenario::Controls);
    let mut c = Criterion::new();
    c.record(&controls, AtLeast("gap", 1e4));
    c.seconds("full suite in", wall.elapsed().as_secs_f64(), 300.0);
    push(11, c);

    let mut all = true;
    for (n, c) in &criteria {
        all &= c.pass;
        println!("criterion {n:>2} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.lines.join("; "));
    }
    println!("acceptance: {}", if all { "all criteria pass" } else { "FAILED" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
