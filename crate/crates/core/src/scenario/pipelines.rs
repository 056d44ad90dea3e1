//! The eight verification pipelines.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::{Artifact, Bound, CheckRecord, Scenario, ScenarioConfig};
use crate::curve::{abel_tangent, build_abel_data, fay_vectors, AbelData, CurvePoint, CurveSpec, FayVectors, Sheet};
use crate::divisor::{
    residual_cm7, residual_cm7d, reverify_sample, sample_theta_divisor, singular_locus_probe, DEFAULT_PROBE_DEPTH,
};
use crate::error::{Error, Result};
use crate::kummer::{fit_secancy_discrete, fit_secancy_semidiscrete, SecancyData};
use crate::lattice::{
    bdhe_fields, bdhe_psi_residual, bdhe_window_constants, toda_fields, toda_psi_residual, toda_window_constants,
    LatticeWindow,
};
use crate::rng::{self, SeededRng};
use crate::roots::Rect;
use crate::series::{
    cm5_residual, discrete_series_extend, discrete_series_recheck, f2d_residual, find_zero, residue_consistency,
    rs_integrate, semidiscrete_residual, semidiscrete_series_extend, track_tau_zero, PeriodicFields,
    PeriodicSeriesTable, RsKernel, RsState, SeriesTable, Shifted, TauFunction, ThetaTau,
};
use crate::theta::{
    envelope, relative_sum_residual, theta_at_radius, theta_fd_check, theta_value, truncation_radius, PeriodMatrix,
    ScaledComplex, ThetaRequest, REL_FLOOR,
};
use crate::CVector;

/// Additive perturbation of tau used by the negative controls.
const TAU_SHIFT: f64 = 0.05;
/// Decomposable period matrix of the product-of-tori control.
const DECOMPOSABLE: [f64; 2] = [1.0, 1.3];
const TUPLE_ATTEMPTS: usize = 20;
/// Time step of the semi-discrete stencil grid; the closure defect scales as its fourth power.
const STENCIL_STEP: f64 = 2.5e-4;

pub(super) struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    pub records: Vec<CheckRecord>,
    pub artifacts: Vec<Artifact>,
}

impl<'a> Ctx<'a> {
    pub fn new(cfg: &'a ScenarioConfig) -> Self {
        Ctx {
            cfg,
            records: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn at_most(&mut self, name: &str, residual: f64) {
        let t = self.cfg.tolerance(name);
        self.records.push(CheckRecord::new(name, residual, t, Bound::AtMost));
    }

    fn at_least(&mut self, name: &str, residual: f64) {
        let t = self.cfg.tolerance(name);
        self.records.push(CheckRecord::new(name, residual, t, Bound::AtLeast));
    }

    fn artifact(&mut self, name: &str, csv: String) {
        self.artifacts.push(Artifact { name: name.into(), csv });
    }

    fn samples(&self, default: usize) -> usize {
        self.cfg.sizes.samples.unwrap_or(default)
    }

    fn capped(&self, b: PeriodMatrix) -> PeriodMatrix {
        match self.cfg.radius_cap {
            Some(cap) => b.with_radius_cap(cap),
            None => b,
        }
    }
}

/// Curve data shared by the curve-based pipelines.
struct Jacobian {
    data: AbelData,
    b: PeriodMatrix,
}

impl Jacobian {
    fn new(ctx: &Ctx<'_>) -> Result<Self> {
        let spec = ctx.cfg.curve.resolve()?;
        let data = build_abel_data(&spec)?;
        let b = ctx.capped(data.period_matrix().clone());
        Ok(Jacobian { data, b })
    }

    fn random_point(&self, r: &mut SeededRng) -> CurvePoint {
        match self.data.curve() {
            CurveSpec::Genus1 { .. } => CurvePoint::Torus(rng::cell_vector(r, &self.b)[0]),
            CurveSpec::Hyperelliptic2 { .. } => {
                let x = rng::complex_in_box(r, 1.5);
                let sheet = if r.gen_bool(0.5) { Sheet::Plus } else { Sheet::Minus };
                CurvePoint::affine(x, sheet)
            }
        }
    }

    /// Fay vectors of a seeded 4-point tuple and the tangent direction at its second point.
    fn tuple(&self, r: &mut SeededRng) -> Result<(FayVectors, CVector)> {
        let mut last = None;
        for _ in 0..TUPLE_ATTEMPTS {
            let pts: Vec<CurvePoint> = (0..4).map(|_| self.random_point(r)).collect();
            let attempt = fay_vectors(&self.data, &pts[0], &pts[1], &pts[2], &pts[3])
                .and_then(|f| Ok((f, abel_tangent(&self.data, &pts[1])?)));
            match attempt {
                Ok(t) => return Ok(t),
                // a draw on or near a branch point (or whose path grazes one) is redrawn
                Err(
                    e @ (Error::CoincidentPoints(_)
                    | Error::BranchPoint(_)
                    | Error::PathFailure(_)
                    | Error::QuadratureStall { .. }),
                ) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

/// Genus-one lattice for the tau-function pipelines: the curve's own torus, or `B = i`.
fn torus(ctx: &Ctx<'_>) -> Result<PeriodMatrix> {
    let tau = match ctx.cfg.curve.resolve()? {
        CurveSpec::Genus1 { tau } => tau,
        CurveSpec::Hyperelliptic2 { .. } => Complex64::new(0.0, 1.0),
    };
    Ok(ctx.capped(PeriodMatrix::from_rows(1, &[tau])?))
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn min(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (b.norm() + REL_FLOOR)
}

pub(super) fn run(ctx: &mut Ctx<'_>) -> Result<()> {
    match ctx.cfg.scenario {
        Scenario::ThetaSelftest => theta_selftest(ctx),
        Scenario::FayTrisecant => fay_trisecant(ctx),
        Scenario::DivisorIdentities => divisor_identities(ctx),
        Scenario::Toda => toda(ctx),
        Scenario::Bdhe => bdhe(ctx),
        Scenario::RsDynamics => rs_dynamics(ctx),
        Scenario::WaveSeries => wave_series(ctx),
        Scenario::Controls => controls(ctx),
    }
}

fn theta_selftest(ctx: &mut Ctx<'_>) -> Result<()> {
    // the curve is not used, but a bad reference is still an input error
    ctx.cfg.curve.resolve()?;
    let mut r = rng::seeded(ctx.cfg.seed);
    let stability_tol = ctx.cfg.tolerance("radius_stability");
    let (mut even, mut quasi, mut stable, mut fd1, mut fd2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..ctx.samples(1000) {
        let g = 1 + k % 3;
        let b = ctx.capped(rng::period_matrix(&mut r, g)?);
        let z = rng::complex_vector(&mut r, g, 1.0);
        let value = theta_value(&b, &z)?.value;
        let mirrored = theta_value(&b, &-&z)?.value;
        even = even.max(relative_sum_residual(&[value, -mirrored], REL_FLOOR));
        for j in 0..g {
            let col = b.entries().column(j).into_owned();
            let shifted = theta_value(&b, &(&z + col))?.value;
            let factor = ScaledComplex::exp(-Complex64::i() * PI * b.entries()[(j, j)] - Complex64::i() * 2.0 * PI * z[j]);
            quasi = quasi.max(relative_sum_residual(&[shifted, -(factor * value)], REL_FLOOR));
        }
        let req = ThetaRequest::new(&b, z.clone()).with_tol(stability_tol);
        let radius = truncation_radius(&b, &z, stability_tol)?;
        let diff = theta_at_radius(&req, radius)? - theta_at_radius(&req, radius + 4)?;
        if !diff.is_zero() {
            stable = stable.max((diff.ln_abs() - envelope(&b, &z)).exp());
        }
        let unit = |v: CVector| {
            let n = v.norm();
            v / Complex64::new(n, 0.0)
        };
        let d1 = unit(rng::complex_vector(&mut r, g, 1.0));
        let d2 = unit(rng::complex_vector(&mut r, g, 1.0));
        fd1 = fd1.max(theta_fd_check(&ThetaRequest::new(&b, z.clone()).with_deriv(d1.clone()), 1e-4)?);
        fd2 = fd2.max(theta_fd_check(&ThetaRequest::new(&b, z).with_deriv(d1).with_deriv(d2), 1e-4)?);
    }
    ctx.at_most("evenness", even);
    ctx.at_most("quasi_periodicity", quasi);
    ctx.at_most("radius_stability", stable);
    ctx.at_most("fd_first", fd1);
    ctx.at_most("fd_second", fd2);
    Ok(())
}

/// Discrete fits on Jacobian tuples and on random vectors over the same lattice.
fn fit_arms(jac: &Jacobian, seed: u64, count: usize) -> Result<(Vec<SecancyData>, Vec<f64>)> {
    let mut r = rng::seeded(seed);
    let g = jac.b.genus();
    let mut fits = Vec::with_capacity(count);
    for _ in 0..count {
        let (f, _) = jac.tuple(&mut r)?;
        fits.push(fit_secancy_discrete(&f.u, &f.v, &f.a, &jac.b)?);
    }
    let mut rc = rng::seeded(seed ^ 0x5eed_c0de);
    let mut random = Vec::with_capacity(count);
    for _ in 0..count {
        let u = rng::complex_vector(&mut rc, g, 0.5);
        let v = rng::complex_vector(&mut rc, g, 0.5);
        let a = rng::complex_vector(&mut rc, g, 0.5);
        random.push(fit_secancy_discrete(&u, &v, &a, &jac.b)?.residual);
    }
    Ok((fits, random))
}

fn gap(negative: f64, positive: f64) -> f64 {
    negative / positive.max(f64::MIN_POSITIVE)
}

fn fay_trisecant(ctx: &mut Ctx<'_>) -> Result<()> {
    let jac = Jacobian::new(ctx)?;
    let n = ctx.samples(5);
    let (fits, random) = fit_arms(&jac, ctx.cfg.seed, n)?;
    let pos = max(fits.iter().map(|f| f.residual));
    let neg = min(random.iter().copied());
    ctx.at_most("discrete_fit", pos);
    ctx.at_least("random_control", neg);
    ctx.at_least("gap", gap(neg, pos));
    let mut r = rng::seeded(ctx.cfg.seed);
    let mut semi: f64 = 0.0;
    for _ in 0..n {
        let (f, tangent) = jac.tuple(&mut r)?;
        semi = semi.max(fit_secancy_semidiscrete(&f.u, &tangent, &f.a, &jac.b)?.residual);
    }
    ctx.at_most("semidiscrete_fit", semi);
    Ok(())
}

fn decomposable_cm7d(ctx: &Ctx<'_>, seed: u64, count: usize) -> Result<f64> {
    let zero = Complex64::new(0.0, 0.0);
    let [a, b] = DECOMPOSABLE;
    let dec = ctx.capped(PeriodMatrix::from_rows(
        2,
        &[Complex64::new(0.0, a), zero, zero, Complex64::new(0.0, b)],
    )?);
    let mut r = rng::seeded(seed ^ 0xdec0);
    let u = rng::complex_vector(&mut r, 2, 0.5);
    let v = rng::complex_vector(&mut r, 2, 0.5);
    let samples = sample_theta_divisor(&dec, seed, count)?;
    // one sample already separating the lattice from a Jacobian is enough
    Ok(max(samples
        .iter()
        .map(|s| residual_cm7d(s, &u, &v, &dec))
        .collect::<Result<Vec<_>>>()?))
}

fn divisor_identities(ctx: &mut Ctx<'_>) -> Result<()> {
    let jac = Jacobian::new(ctx)?;
    let mut r = rng::seeded(ctx.cfg.seed);
    let (f, tangent) = jac.tuple(&mut r)?;
    let n = ctx.samples(10);
    let samples = sample_theta_divisor(&jac.b, ctx.cfg.seed, n)?;
    let (mut reverify, mut cm7d, mut cm7, mut probe) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    for s in &samples {
        reverify = reverify.max(reverify_sample(&jac.b, s)?);
        cm7d = cm7d.max(residual_cm7d(s, &f.u, &f.v, &jac.b)?);
        cm7 = cm7.max(residual_cm7(s, &f.u, &tangent, &jac.b)?);
        probe = probe.min(singular_locus_probe(s, &f.u, &f.v, &jac.b, DEFAULT_PROBE_DEPTH)?);
    }
    ctx.at_most("reverify", reverify);
    ctx.at_most("cm7d", cm7d);
    ctx.at_most("cm7", cm7);
    ctx.at_least("singular_locus_probe", probe);
    let dec = decomposable_cm7d(ctx, ctx.cfg.seed, n)?;
    ctx.at_least("decomposable_control", dec);
    Ok(())
}

fn toda(ctx: &mut Ctx<'_>) -> Result<()> {
    let jac = Jacobian::new(ctx)?;
    let mut r = rng::seeded(ctx.cfg.seed);
    let (f, tangent) = jac.tuple(&mut r)?;
    let fit = fit_secancy_semidiscrete(&f.u, &tangent, &f.a, &jac.b)?;
    ctx.at_most("semidiscrete_fit", fit.residual);
    let w = ctx.cfg.sizes.window.unwrap_or(8);
    let z = rng::cell_vector(&mut r, &jac.b);
    let window = LatticeWindow::toda((0, w as i64), (0..w).map(|j| j as f64 * 0.125).collect(), z)?;
    let table = toda_fields(&fit.u, &fit.v, &fit.a, fit.exp_p, fit.e, &window, &jac.b)?;
    ctx.at_most("toda_psi", toda_psi_residual(&table)?);
    let (exp_p, e) = toda_window_constants(&fit.u, &fit.v, &fit.a, &window, &jac.b)?;
    ctx.at_most(
        "constants_consistency",
        relative(exp_p, fit.exp_p.to_complex()).max(relative(e, fit.e)),
    );
    ctx.artifact("toda_fields", table.to_csv());
    Ok(())
}

fn bdhe(ctx: &mut Ctx<'_>) -> Result<()> {
    let jac = Jacobian::new(ctx)?;
    let mut r = rng::seeded(ctx.cfg.seed);
    let (f, _) = jac.tuple(&mut r)?;
    let fit = fit_secancy_discrete(&f.u, &f.v, &f.a, &jac.b)?;
    ctx.at_most("discrete_fit", fit.residual);
    let w = ctx.cfg.sizes.window.unwrap_or(10) as i64;
    let z = rng::cell_vector(&mut r, &jac.b);
    let window = LatticeWindow::bdhe((0, w), (0, w), z)?;
    let table = bdhe_fields(&fit.u, &fit.v, &fit.a, fit.exp_p, fit.exp_e, &window, &jac.b)?;
    ctx.at_most("bdhe_psi", bdhe_psi_residual(&table)?);
    let (exp_p, exp_e) = bdhe_window_constants(&fit.u, &fit.v, &fit.a, &window, &jac.b)?;
    ctx.at_most(
        "constants_consistency",
        relative(exp_p, fit.exp_p.to_complex()).max(relative(exp_e, fit.exp_e.to_complex())),
    );
    ctx.artifact("bdhe_fields", table.to_csv());
    Ok(())
}

/// Seeded `(U, V, Z)` uniform in the period cell.
fn torus_triples(b: &PeriodMatrix, seed: u64, count: usize) -> Vec<(CVector, CVector, CVector)> {
    let mut r = rng::seeded(seed);
    (0..count)
        .map(|_| {
            let u = rng::cell_vector(&mut r, b);
            let v = rng::cell_vector(&mut r, b);
            let z = rng::cell_vector(&mut r, b);
            (u, v, z)
        })
        .collect()
}

/// Square around the origin holding a whole period cell of `x -> tau(x, t)`.
fn cell_rect(step: Complex64, b: &PeriodMatrix) -> Rect {
    let tau = b.entries()[(0, 0)];
    let half = (1.0 + tau.norm()) / step.norm();
    Rect::new(Complex64::new(-half, -half), Complex64::new(half, half))
}

fn uniform_grid(n: usize, t_end: f64) -> Vec<f64> {
    (0..n).map(|j| t_end * j as f64 / (n - 1) as f64).collect()
}

fn rs_dynamics(ctx: &mut Ctx<'_>) -> Result<()> {
    let b = torus(ctx)?;
    let n = ctx.samples(20);
    let grid = uniform_grid(ctx.cfg.sizes.grid.unwrap_or(101), 1.0);
    let triples = torus_triples(&b, ctx.cfg.seed, n);
    let (mut cm5, mut control) = (0.0f64, 0.0f64);
    for (k, (u, v, z)) in triples.iter().enumerate() {
        let tau = ThetaTau::new(u.clone(), v.clone(), z.clone(), b.clone())?;
        let rect = cell_rect(u[0], &b);
        let path = track_tau_zero(&tau, &grid, find_zero(&tau, 0.0, &rect)?)?;
        cm5 = cm5.max(cm5_residual(&path, &tau)?);
        if k == 0 {
            ctx.artifact("zero_path", path.to_csv());
        }
        let shifted = Shifted {
            inner: tau,
            shift: Complex64::new(TAU_SHIFT, 0.0),
        };
        let path = track_tau_zero(&shifted, &grid, find_zero(&shifted, 0.0, &rect)?)?;
        control = control.max(cm5_residual(&path, &shifted)?);
    }
    ctx.at_most("cm5", cm5);
    ctx.at_least("cm5_control", control);

    let (u0, v0, z0) = &triples[0];
    let omega1 = Complex64::new(2.0, 0.0) / u0[0];
    let omega2 = b.entries()[(0, 0)] / u0[0];
    let kernels = [
        ("rational", RsKernel::Rational),
        ("trigonometric", RsKernel::trigonometric(Complex64::new(3.0, 0.0))?),
        ("elliptic", RsKernel::elliptic(omega1, omega2)?),
    ];
    let mut r = rng::seeded(ctx.cfg.seed ^ 0x0dd);
    let mut odd: f64 = 0.0;
    for (_, k) in &kernels {
        for _ in 0..100 {
            let x = rng::complex_in_box(&mut r, 1.5);
            let (f, g) = (k.interaction(x)?, k.interaction(-x)?);
            odd = odd.max((f + g).norm() / (f.norm() + REL_FLOOR));
        }
    }
    ctx.at_most("kernel_oddness", odd);

    let x0 = rng::complex_in_box(&mut r, 1.0);
    let v_free = rng::complex_in_box(&mut r, 1.0);
    let free = rs_integrate(&RsState::new(vec![x0], vec![v_free], RsKernel::Rational)?, 1.0, 1e-3)?;
    let drift = max(free.t.iter().zip(&free.x).map(|(t, x)| (x[0] - (x0 + v_free * *t)).norm()));
    ctx.at_most("free_particle", drift);

    for (name, kernel) in kernels {
        let x: Vec<Complex64> = (0..3)
            .map(|i| Complex64::new(1.7 * i as f64, 0.3) + rng::complex_in_box(&mut r, 0.2))
            .collect();
        let xdot: Vec<Complex64> = (0..3).map(|_| rng::complex_in_box(&mut r, 0.5)).collect();
        let traj = rs_integrate(&RsState::new(x, xdot, kernel)?, 1.0, 1e-3)?;
        ctx.at_most(&format!("conservation_{name}"), traj.momentum_drift());
        if name == "rational" {
            ctx.artifact("rs_trajectory", traj.to_csv());
        }
    }

    // two zeros of one genus-one tau, one period 1/U apart, against the
    // elliptic system on the doubled lattice (2/U, B/U)
    let tau = ThetaTau::new(u0.clone(), v0.clone(), z0.clone(), b.clone())?;
    let first = find_zero(&tau, 0.0, &cell_rect(u0[0], &b))?;
    let fine = uniform_grid(501, 0.5);
    let p1 = track_tau_zero(&tau, &fine, first)?;
    let p2 = track_tau_zero(&tau, &fine, first + Complex64::new(1.0, 0.0) / u0[0])?;
    let state = RsState::new(
        vec![p1.eta[0], p2.eta[0]],
        vec![p1.laurent[0].eta_dot, p2.laurent[0].eta_dot],
        RsKernel::elliptic(omega1, omega2)?,
    )?;
    let traj = rs_integrate(&state, 0.5, 1e-3)?;
    let agreement = max((0..fine.len()).map(|j| (traj.x[j][0] - p1.eta[j]).norm().max((traj.x[j][1] - p2.eta[j]).norm())));
    ctx.at_most("tracking_agreement", agreement);
    Ok(())
}

struct WaveArms {
    f2d: f64,
    recheck: f64,
    residue: f64,
    f2d_control: f64,
    residue_control: f64,
}

/// Discrete checks at a zero of `tau(., 0)`: the shift ratio, the series sweep and the
/// residue consistency at orders 0 and 1, for `tau` and for `tau + shift`.
fn discrete_wave_checks(tau: &ThetaTau, rect: &Rect, arms: &mut WaveArms) -> Result<()> {
    fn one<T: TauFunction>(tau: &T, rect: &Rect) -> Result<(f64, f64, f64)> {
        let eta = find_zero(tau, 0.0, rect)?;
        let f2d = f2d_residual(tau, eta, 0.0)?;
        let seeds = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)];
        let mut table = SeriesTable::new(eta, 8, crate::series::wave::DEFAULT_S_MAX)?;
        table = discrete_series_extend(table, tau, 0, -2, seeds)?;
        table = discrete_series_extend(table, tau, 0, -1, seeds)?;
        table = discrete_series_extend(table, tau, 1, 0, seeds)?;
        let recheck = discrete_series_recheck(&table, tau, 0, -1)?.max(discrete_series_recheck(&table, tau, 1, 0)?);
        let residue = residue_consistency(&table, tau, 0, 0)?
            .residual
            .max(residue_consistency(&table, tau, 1, 0)?.residual);
        Ok((f2d, recheck, residue))
    }
    let (f2d, recheck, residue) = one(tau, rect)?;
    arms.f2d = arms.f2d.max(f2d);
    arms.recheck = arms.recheck.max(recheck);
    arms.residue = arms.residue.max(residue);
    let shifted = Shifted {
        inner: tau.clone(),
        shift: Complex64::new(TAU_SHIFT, 0.0),
    };
    let (f2d, _, residue) = one(&shifted, rect)?;
    arms.f2d_control = arms.f2d_control.max(f2d);
    arms.residue_control = arms.residue_control.max(residue);
    Ok(())
}

fn wave_series(ctx: &mut Ctx<'_>) -> Result<()> {
    let n = ctx.samples(20);
    let mut arms = WaveArms {
        f2d: 0.0,
        recheck: 0.0,
        residue: 0.0,
        f2d_control: 0.0,
        residue_control: 0.0,
    };
    let b1 = torus(ctx)?;
    for (u, v, z) in torus_triples(&b1, ctx.cfg.seed, n) {
        let tau = ThetaTau::discrete(&u, &v, &z, b1.clone())?;
        let rect = cell_rect(tau.u()[0], &b1);
        discrete_wave_checks(&tau, &rect, &mut arms)?;
    }
    ctx.at_most("f2d_genus1", arms.f2d);
    let mut worst_recheck = arms.recheck;
    let mut worst_residue = arms.residue;
    let mut f2d_control = arms.f2d_control;
    let mut residue_control = arms.residue_control;

    let jac = Jacobian::new(ctx)?;
    if jac.b.genus() == 2 {
        let mut r = rng::seeded(ctx.cfg.seed);
        let (f, _) = jac.tuple(&mut r)?;
        let rect = Rect::new(Complex64::new(-2.0, -2.0), Complex64::new(2.0, 2.0));
        let mut g2 = WaveArms {
            f2d: 0.0,
            recheck: 0.0,
            residue: 0.0,
            f2d_control: 0.0,
            residue_control: 0.0,
        };
        let mut done = 0;
        let mut attempts = 0;
        while done < n {
            attempts += 1;
            if attempts > 10 * n {
                return Err(Error::RootSearchFailed { found: done, wanted: n });
            }
            let z = rng::cell_vector(&mut r, &jac.b);
            let tau = ThetaTau::discrete(&f.u, &f.v, &z, jac.b.clone())?;
            match discrete_wave_checks(&tau, &rect, &mut g2) {
                Ok(()) => done += 1,
                // no zero in the search square for this Z, or a factor too close to a zero: draw again
                Err(Error::RootSearchFailed { .. } | Error::GuardFailed(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        ctx.at_most("f2d_genus2", g2.f2d);
        worst_recheck = worst_recheck.max(g2.recheck);
        worst_residue = worst_residue.max(g2.residue);
        f2d_control = f2d_control.max(g2.f2d_control);
        residue_control = residue_control.max(g2.residue_control);
    }
    ctx.at_least("f2d_control", f2d_control);
    ctx.at_most("discrete_recheck", worst_recheck);
    ctx.at_most("residue", worst_residue);
    ctx.at_least("residue_control", residue_control);

    // semi-discrete: U = 1/N makes u exactly N-periodic
    let period = 5;
    let mut r = rng::seeded(ctx.cfg.seed ^ 0x5e41);
    let u = CVector::from_element(1, Complex64::new(1.0 / period as f64, 0.0));
    let (v, z) = (rng::cell_vector(&mut r, &b1), rng::cell_vector(&mut r, &b1));
    let tau = ThetaTau::new(u, v, z, b1)?;
    let t: Vec<f64> = (0..5).map(|j| STENCIL_STEP * j as f64).collect();
    let fields = PeriodicFields::from_tau(&tau, period, t.clone())?;
    let mut table = PeriodicSeriesTable::new(period, t.clone(), crate::series::wave::DEFAULT_S_MAX)?;
    table = semidiscrete_series_extend(table, &fields, 0, true)?;
    table = semidiscrete_series_extend(table, &fields, 1, true)?;
    let closed = semidiscrete_residual(&table, &fields, 0)?.max(semidiscrete_residual(&table, &fields, 1)?);
    ctx.at_most("semidiscrete", closed);
    let mut raw = PeriodicSeriesTable::new(period, t, crate::series::wave::DEFAULT_S_MAX)?;
    raw = semidiscrete_series_extend(raw, &fields, 0, true)?;
    raw = semidiscrete_series_extend(raw, &fields, 1, false)?;
    ctx.at_least("semidiscrete_unnormalized_control", semidiscrete_residual(&raw, &fields, 1)?);
    Ok(())
}

fn controls(ctx: &mut Ctx<'_>) -> Result<()> {
    let jac = Jacobian::new(ctx)?;
    let n = ctx.samples(20);
    let (fits, random) = fit_arms(&jac, ctx.cfg.seed, n)?;
    let pos = max(fits.iter().map(|f| f.residual));
    let rand_min = min(random.iter().copied());
    let dec = decomposable_cm7d(ctx, ctx.cfg.seed, 10)?;
    ctx.at_most("jacobian_fit", pos);
    ctx.at_least("random_control", rand_min);
    ctx.at_least("decomposable_control", dec);
    ctx.at_least("gap", gap(rand_min.min(dec), pos));
    Ok(())
}
