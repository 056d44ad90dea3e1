//! Zeros of tau functions and the dynamics they obey, plus the order-by-order
//! recursions for formal wave solutions.
//!
//! A tau function here is any `tau(x, t)` holomorphic in `x`, given through
//! its 2-jet. [`ThetaTau`] is the theta-functional one,
//! `tau(x, t) = theta(xU + tV + Z)`.

mod stencil;
pub mod rs;
pub mod wave;

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{self, Rect};
use crate::theta::{theta_jet, PeriodMatrix, ScaledComplex, ThetaCharacteristic, ThetaEval, REL_FLOOR};
use crate::CVector;

pub use rs::{rs_integrate, RsKernel, RsState, Trajectory};
pub use wave::{
    discrete_series_extend, discrete_series_recheck, f2d_residual, residue_consistency, semidiscrete_residual,
    semidiscrete_series_extend, PeriodicFields, PeriodicSeriesTable, ResidueCheck, SeriesLevel, SeriesTable,
};

/// Relative size `|tau| / (|tau| + |tau_x|)` accepted at a tracked zero.
pub const ZERO_TOL: f64 = 1e-10;
/// Normalized `|tau_x|` below which a zero is treated as multiple.
pub const DEGENERATE_TOL: f64 = 1e-10;
/// Normalized `|tau|` below which a neighbour `eta +- 1` is a zero.
pub const GUARD_TOL: f64 = 1e-8;
/// Radius of the circle used for the Laurent constant.
pub const LAURENT_RADIUS: f64 = 2e-3;
const LAURENT_POINTS: usize = 5;
const JUMP_SLACK: f64 = 1e-9;

/// `tau` with its first and second derivatives in `x` and `t`.
#[derive(Clone, Copy, Debug)]
pub struct TauJet {
    pub value: ScaledComplex,
    pub dx: ScaledComplex,
    pub dt: ScaledComplex,
    pub dxx: ScaledComplex,
    pub dxt: ScaledComplex,
    pub dtt: ScaledComplex,
    /// Log of the natural size of `tau` at this point.
    pub envelope: f64,
}

impl TauJet {
    fn normalized(&self, s: ScaledComplex) -> f64 {
        if s.is_zero() {
            0.0
        } else {
            (s.ln_abs() - self.envelope).exp()
        }
    }

    pub fn normalized_abs(&self) -> f64 {
        self.normalized(self.value)
    }

    /// `|tau| / (|tau| + |tau_x|)`.
    pub fn zero_defect(&self) -> f64 {
        let (m, _) = crate::theta::to_common_scale(&[self.value, self.dx]);
        m[0].norm() / (m[0].norm() + m[1].norm() + REL_FLOOR)
    }

    /// `-tau_t / tau`.
    pub fn v(&self) -> Complex64 {
        -(self.dt / self.value).to_complex()
    }
}

pub trait TauFunction {
    fn jet(&self, x: Complex64, t: f64) -> Result<TauJet>;

    fn value(&self, x: Complex64, t: f64) -> Result<ThetaEval> {
        let j = self.jet(x, t)?;
        Ok(ThetaEval {
            value: j.value,
            envelope: j.envelope,
        })
    }
}

/// `tau(x, t) = theta(xU + tV + Z | B)`.
#[derive(Clone, Debug)]
pub struct ThetaTau {
    u: CVector,
    v: CVector,
    z: CVector,
    b: PeriodMatrix,
}

impl ThetaTau {
    pub fn new(u: CVector, v: CVector, z: CVector, b: PeriodMatrix) -> Result<Self> {
        let g = b.genus();
        if u.len() != g || v.len() != g || z.len() != g {
            return Err(Error::DimensionMismatch(format!("expected vectors of length {g}")));
        }
        Ok(ThetaTau { u, v, z, b })
    }

    /// The fully discrete tau in the variables `x = m - n`, `nu = m + n - 1`:
    /// `theta((x/2)(U - V) + ((nu + 1)/2)(U + V) + Z)`.
    pub fn discrete(u: &CVector, v: &CVector, z: &CVector, b: PeriodMatrix) -> Result<Self> {
        let half = Complex64::new(0.5, 0.0);
        let sum = (u + v) * half;
        ThetaTau::new((u - v) * half, sum.clone(), z + sum, b)
    }

    pub fn u(&self) -> &CVector {
        &self.u
    }

    pub fn v(&self) -> &CVector {
        &self.v
    }

    pub fn z(&self) -> &CVector {
        &self.z
    }

    pub fn period_matrix(&self) -> &PeriodMatrix {
        &self.b
    }

    pub fn point(&self, x: Complex64, t: f64) -> CVector {
        &self.u * x + &self.v * Complex64::new(t, 0.0) + &self.z
    }
}

impl TauFunction for ThetaTau {
    fn jet(&self, x: Complex64, t: f64) -> Result<TauJet> {
        let g = self.b.genus();
        let j = theta_jet(&self.b, &self.point(x, t), &ThetaCharacteristic::zero(g), &self.u, &self.v)?;
        Ok(TauJet {
            value: j.value,
            dx: j.du,
            dt: j.dv,
            dxx: j.duu,
            dxt: j.duv,
            dtt: j.dvv,
            envelope: j.envelope,
        })
    }

    fn value(&self, x: Complex64, t: f64) -> Result<ThetaEval> {
        crate::theta::theta_value(&self.b, &self.point(x, t))
    }
}

/// `tau + shift`; not a theta function of any lattice once `shift != 0`.
#[derive(Clone, Debug)]
pub struct Shifted<T> {
    pub inner: T,
    pub shift: Complex64,
}

impl<T: TauFunction> TauFunction for Shifted<T> {
    fn jet(&self, x: Complex64, t: f64) -> Result<TauJet> {
        let mut j = self.inner.jet(x, t)?;
        j.value = j.value + ScaledComplex::from(self.shift);
        Ok(j)
    }
}

fn newton_zero(tau: &impl TauFunction, t: f64, start: Complex64) -> Result<Option<Complex64>> {
    let f_df = |x: Complex64| -> Result<(ScaledComplex, ScaledComplex)> {
        let j = tau.jet(x, t)?;
        Ok((j.value, j.dx))
    };
    roots::newton(&f_df, start)
}

/// A zero of `x -> tau(x, t)` inside `rect`, the one nearest its center.
pub fn find_zero(tau: &impl TauFunction, t: f64, rect: &Rect) -> Result<Complex64> {
    let f = |x: Complex64| -> Result<ScaledComplex> { Ok(tau.value(x, t)?.value) };
    let mut best: Option<Complex64> = None;
    for (cell, _) in roots::bracket_zeros(&f, rect, 8)? {
        let Some(x) = newton_zero(tau, t, cell.center())? else {
            continue;
        };
        if !rect.contains(x, 0.0) || tau.jet(x, t)?.zero_defect() > ZERO_TOL {
            continue;
        }
        let c = rect.center();
        if best.is_none_or(|b| (x - c).norm() < (b - c).norm()) {
            best = Some(x);
        }
    }
    best.ok_or(Error::RootSearchFailed { found: 0, wanted: 1 })
}

/// Local data of `v = -d_t ln tau` at a moving zero:
/// `v = eta_dot / (x - eta) + v0 + O(x - eta)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Laurent {
    pub eta_dot: Complex64,
    pub v0: Complex64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroPath {
    pub grid: Vec<f64>,
    pub eta: Vec<Complex64>,
    pub laurent: Vec<Laurent>,
    /// `|tau| / (|tau| + |tau_x|)` at each tracked zero.
    pub zero_defect: Vec<f64>,
}

impl ZeroPath {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,eta_re,eta_im,v0_re,v0_im\n");
        for ((t, e), l) in self.grid.iter().zip(&self.eta).zip(&self.laurent) {
            let _ = writeln!(out, "{},{:e},{:e},{:e},{:e}", t, e.re, e.im, l.v0.re, l.v0.im);
        }
        out
    }
}

/// Constant term of `v` at the zero `eta`: the mean of
/// `v(x) - eta_dot/(x - eta)` over five points on a small circle, which is
/// exact up to the fifth Taylor coefficient.
pub fn laurent_constant(tau: &impl TauFunction, eta: Complex64, t: f64, eta_dot: Complex64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..LAURENT_POINTS {
        let d = Complex64::from_polar(LAURENT_RADIUS, 2.0 * std::f64::consts::PI * k as f64 / LAURENT_POINTS as f64);
        sum += tau.jet(eta + d, t)?.v() - eta_dot / d;
    }
    Ok(sum / LAURENT_POINTS as f64)
}

/// Continues a zero of `x -> tau(x, t)` along `grid`, starting Newton at
/// `eta0` and then at the previous zero.
pub fn track_tau_zero(tau: &impl TauFunction, grid: &[f64], eta0: Complex64) -> Result<ZeroPath> {
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("grid values must be finite".into()));
    }
    let mut path = ZeroPath {
        grid: grid.to_vec(),
        eta: Vec::with_capacity(grid.len()),
        laurent: Vec::with_capacity(grid.len()),
        zero_defect: Vec::with_capacity(grid.len()),
    };
    for (j, &t) in grid.iter().enumerate() {
        let start = path.eta.last().copied().unwrap_or(eta0);
        let eta = newton_zero(tau, t, start)?
            .ok_or_else(|| Error::LostZero(format!("Newton did not converge at t = {t}")))?;
        let jet = tau.jet(eta, t)?;
        let slope = jet.normalized(jet.dx);
        if slope < DEGENERATE_TOL {
            return Err(Error::DegenerateZero(slope));
        }
        let defect = jet.zero_defect();
        if defect > ZERO_TOL {
            return Err(Error::LostZero(format!("relative |tau| = {defect:e} at t = {t}")));
        }
        let eta_dot = -(jet.dt / jet.dx).to_complex();
        if j > 0 {
            let dt = t - grid[j - 1];
            let (prev, prev_dot) = (path.eta[j - 1], path.laurent[j - 1].eta_dot);
            let step = eta - prev;
            let speed = prev_dot.norm().max(eta_dot.norm());
            let bound = 10.0 * dt.abs() * speed + JUMP_SLACK;
            let drift = (step - (prev_dot + eta_dot) * (0.5 * dt)).norm();
            if step.norm() > bound || drift > 0.5 * dt.abs() * speed + JUMP_SLACK {
                return Err(Error::LostZero(format!(
                    "zero jumped by {:e} between t = {} and t = {t}",
                    step.norm(),
                    grid[j - 1]
                )));
            }
        }
        let v0 = laurent_constant(tau, eta, t, eta_dot)?;
        path.eta.push(eta);
        path.laurent.push(Laurent { eta_dot, v0 });
        path.zero_defect.push(defect);
    }
    Ok(path)
}

/// `v(x, t)` at a point that must stay away from the zeros of `tau`.
fn guarded_v(tau: &impl TauFunction, x: Complex64, t: f64) -> Result<Complex64> {
    let j = tau.jet(x, t)?;
    if j.normalized_abs() < GUARD_TOL {
        return Err(Error::GuardFailed(format!("tau({x}, {t}) vanishes")));
    }
    Ok(j.v())
}

/// Largest relative defect of `eta'' = eta' (2 v0 - v(eta+1) - v(eta-1))`
/// over the interior of a uniformly spaced path, with `eta''` from the
/// five-point central difference.
pub fn cm5_residual(path: &ZeroPath, tau: &impl TauFunction) -> Result<f64> {
    let n = path.len();
    if n < 5 {
        return Err(Error::InvalidInput("need at least 5 grid points".into()));
    }
    let h = path.grid[1] - path.grid[0];
    if h == 0.0 || path.grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs()) {
        return Err(Error::InvalidInput("grid must be uniformly spaced".into()));
    }
    let e = &path.eta;
    let mut worst: f64 = 0.0;
    // rounding level of the second difference
    let noise = 64.0 * f64::EPSILON * (1.0 + e.iter().map(|x| x.norm()).fold(0.0, f64::max)) / (h * h);
    for j in 2..n - 2 {
        let t = path.grid[j];
        let eta_dd = (-e[j + 2] + e[j + 1] * 16.0 - e[j] * 30.0 + e[j - 1] * 16.0 - e[j - 2]) / (12.0 * h * h);
        let Laurent { eta_dot, v0 } = path.laurent[j];
        let vp = guarded_v(tau, e[j] + 1.0, t)?;
        let vm = guarded_v(tau, e[j] - 1.0, t)?;
        let rhs = eta_dot * (v0 * 2.0 - vp - vm);
        let scale = eta_dd.norm() + eta_dot.norm() * ((v0 - vp).norm() + (v0 - vm).norm()) + noise;
        worst = worst.max((eta_dd - rhs).norm() / (scale + REL_FLOOR));
    }
    Ok(worst)
}
