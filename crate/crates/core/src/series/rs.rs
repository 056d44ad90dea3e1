//! Pole dynamics: `x_i'' = sum_{j != i} x_i' x_j' F(x_i - x_j)` with
//! `F(x) = 2 phi(x) - phi(x + 1) - phi(x - 1)`, integrated by classical RK4.
//!
//! `phi` is `1/x` (rational), `(pi/w) cot(pi x / w)` (trigonometric, period
//! `w`) or, for periods `w1, w2`,
//! `phi(x) = theta_1'(x/w1 | w2/w1) / (w1 theta_1(x/w1 | w2/w1))`
//! with `theta_1` the odd theta function of characteristic `[1/2, 1/2]`.
//! Each `phi` is odd with a unit-residue pole at 0, and the elliptic `F` is
//! doubly periodic because the quasi-period shifts of `phi` cancel.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::theta::{theta_with_derivative, PeriodMatrix, ThetaCharacteristic};
use crate::CVector;

/// Minimal distance of `x_i - x_j` from `{0, 1, -1}`.
pub const COLLISION_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub enum RsKernel {
    Rational,
    Trigonometric { period: Complex64 },
    Elliptic(Box<EllipticKernel>),
}

#[derive(Clone, Debug)]
pub struct EllipticKernel {
    omega1: Complex64,
    omega2: Complex64,
    modulus: PeriodMatrix,
    odd: ThetaCharacteristic,
}

impl EllipticKernel {
    pub fn periods(&self) -> (Complex64, Complex64) {
        (self.omega1, self.omega2)
    }

    fn phi(&self, x: Complex64) -> Result<Complex64> {
        let z = CVector::from_element(1, x / self.omega1);
        let one = CVector::from_element(1, Complex64::new(1.0, 0.0));
        let (th, dth) = theta_with_derivative(&self.modulus, &z, &self.odd, &one)?;
        Ok((dth / th).to_complex() / self.omega1)
    }
}

impl RsKernel {
    pub fn trigonometric(period: Complex64) -> Result<Self> {
        if period.norm() == 0.0 || !period.re.is_finite() || !period.im.is_finite() {
            return Err(Error::InvalidInput("period must be finite and nonzero".into()));
        }
        Ok(RsKernel::Trigonometric { period })
    }

    /// Periods with `Im(omega2/omega1) > 0`.
    pub fn elliptic(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        if omega1.norm() == 0.0 {
            return Err(Error::InvalidInput("omega1 must be nonzero".into()));
        }
        let modulus = PeriodMatrix::from_rows(1, &[omega2 / omega1])?;
        let odd = ThetaCharacteristic::new(&[0.5], &[0.5])?;
        Ok(RsKernel::Elliptic(Box::new(EllipticKernel {
            omega1,
            omega2,
            modulus,
            odd,
        })))
    }

    pub fn name(&self) -> &'static str {
        match self {
            RsKernel::Rational => "rational",
            RsKernel::Trigonometric { .. } => "trigonometric",
            RsKernel::Elliptic(_) => "elliptic",
        }
    }

    fn phi(&self, x: Complex64) -> Result<Complex64> {
        match self {
            RsKernel::Rational => Ok(x.inv()),
            RsKernel::Trigonometric { period } => {
                let a = x * std::f64::consts::PI / period;
                Ok(a.cos() / a.sin() * std::f64::consts::PI / period)
            }
            RsKernel::Elliptic(k) => k.phi(x),
        }
    }

    fn raw(&self, x: Complex64) -> Result<Complex64> {
        Ok(self.phi(x)? * 2.0 - (self.phi(x + 1.0)? + self.phi(x - 1.0)?))
    }

    /// `F(x)`. The rational form is odd as written; the others are
    /// antisymmetrized so that `F(-x) = -F(x)` holds bit for bit.
    pub fn interaction(&self, x: Complex64) -> Result<Complex64> {
        match self {
            RsKernel::Rational => self.raw(x),
            _ => Ok((self.raw(x)? - self.raw(-x)?) * 0.5),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RsState {
    pub x: Vec<Complex64>,
    pub xdot: Vec<Complex64>,
    pub kernel: RsKernel,
}

impl RsState {
    pub fn new(x: Vec<Complex64>, xdot: Vec<Complex64>, kernel: RsKernel) -> Result<Self> {
        if x.len() != xdot.len() || x.is_empty() {
            return Err(Error::DimensionMismatch("positions and velocities must have equal, nonzero length".into()));
        }
        Ok(RsState { x, xdot, kernel })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn momentum(&self) -> Complex64 {
        self.xdot.iter().sum()
    }
}

fn guard(x: &[Complex64]) -> Result<()> {
    if x.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(Error::Collision("positions blew up".into()));
    }
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = x[i] - x[j];
            if [0.0, 1.0, -1.0].iter().any(|k| (d - k).norm() < COLLISION_TOL) {
                return Err(Error::Collision(format!("particles {i} and {j} at separation {d}")));
            }
        }
    }
    Ok(())
}

fn acceleration(kernel: &RsKernel, x: &[Complex64], xdot: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.len();
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                a[i] += xdot[i] * xdot[j] * kernel.interaction(x[i] - x[j])?;
            }
        }
    }
    Ok(a)
}

/// Sampled states at `t = 0, h, 2h, ...`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Vec<Complex64>>,
    pub xdot: Vec<Vec<Complex64>>,
}

impl Trajectory {
    /// `max_t |sum_i x_i'(t) - sum_i x_i'(0)|`.
    pub fn momentum_drift(&self) -> f64 {
        let p0: Complex64 = self.xdot[0].iter().sum();
        self.xdot
            .iter()
            .map(|v| (v.iter().sum::<Complex64>() - p0).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,i,x_re,x_im,xdot_re,xdot_im\n");
        for (k, &t) in self.t.iter().enumerate() {
            for (i, (x, v)) in self.x[k].iter().zip(&self.xdot[k]).enumerate() {
                let _ = writeln!(out, "{t},{i},{:e},{:e},{:e},{:e}", x.re, x.im, v.re, v.im);
            }
        }
        out
    }
}

/// Fixed-step RK4 over `round(t_end / h)` steps; every step is sampled.
pub fn rs_integrate(state: &RsState, t_end: f64, h: f64) -> Result<Trajectory> {
    if !(h > 0.0) || !h.is_finite() || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput("need h > 0 and t_end >= 0".into()));
    }
    let steps = (t_end / h).round() as usize;
    guard(&state.x)?;
    let k = &state.kernel;
    let n = state.len();
    let mut x = state.x.clone();
    let mut v = state.xdot.clone();
    let mut out = Trajectory {
        t: vec![0.0],
        x: vec![x.clone()],
        xdot: vec![v.clone()],
    };
    let axpy = |a: &[Complex64], b: &[Complex64], s: f64| -> Vec<Complex64> { a.iter().zip(b).map(|(p, q)| p + q * s).collect() };
    for step in 1..=steps {
        let a1 = acceleration(k, &x, &v)?;
        let (x2, v2) = (axpy(&x, &v, 0.5 * h), axpy(&v, &a1, 0.5 * h));
        let a2 = acceleration(k, &x2, &v2)?;
        let (x3, v3) = (axpy(&x, &v2, 0.5 * h), axpy(&v, &a2, 0.5 * h));
        let a3 = acceleration(k, &x3, &v3)?;
        let (x4, v4) = (axpy(&x, &v3, h), axpy(&v, &a3, h));
        let a4 = acceleration(k, &x4, &v4)?;
        for i in 0..n {
            x[i] += (v[i] + (v2[i] + v3[i]) * 2.0 + v4[i]) * (h / 6.0);
            v[i] += (a1[i] + (a2[i] + a3[i]) * 2.0 + a4[i]) * (h / 6.0);
        }
        guard(&x)?;
        out.t.push(step as f64 * h);
        out.x.push(x.clone());
        out.xdot.push(v.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kernels() -> Vec<RsKernel> {
        vec![
            RsKernel::Rational,
            RsKernel::trigonometric(c(3.0, 0.0)).unwrap(),
            RsKernel::elliptic(c(4.0, 0.0), c(0.5, 3.0)).unwrap(),
        ]
    }

    #[test]
    fn interaction_is_odd_bit_for_bit() {
        let mut r = rng::seeded(5);
        for k in kernels() {
            for _ in 0..100 {
                let x = rng::complex_in_box(&mut r, 1.5);
                assert_eq!(k.interaction(-x).unwrap(), -k.interaction(x).unwrap(), "{}", k.name());
            }
        }
    }

    #[test]
    fn kernels_share_the_rational_singularity() {
        let x = c(1e-3, 2e-3);
        let rational = RsKernel::Rational.interaction(x).unwrap();
        for k in kernels() {
            let f = k.interaction(x).unwrap();
            assert!((f - rational).norm() < 1.0, "{}", k.name());
        }
    }

    #[test]
    fn elliptic_interaction_is_doubly_periodic() {
        let k = RsKernel::elliptic(c(4.0, 0.0), c(0.5, 3.0)).unwrap();
        let x = c(0.3, 0.4);
        let f = k.interaction(x).unwrap();
        for w in [c(4.0, 0.0), c(0.5, 3.0)] {
            assert!((k.interaction(x + w).unwrap() - f).norm() < 1e-11 * f.norm());
        }
    }

    #[test]
    fn elliptic_tends_to_trigonometric_for_long_second_period() {
        let e = RsKernel::elliptic(c(3.0, 0.0), c(0.0, 40.0)).unwrap();
        let t = RsKernel::trigonometric(c(3.0, 0.0)).unwrap();
        let x = c(0.4, 0.2);
        assert!((e.interaction(x).unwrap() - t.interaction(x).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn free_particle_moves_linearly() {
        let s = RsState::new(vec![c(0.1, 0.2)], vec![c(0.3, -0.4)], RsKernel::Rational).unwrap();
        let traj = rs_integrate(&s, 1.0, 1e-3).unwrap();
        assert_eq!(traj.t.len(), 1001);
        for (t, x) in traj.t.iter().zip(&traj.x) {
            assert!((x[0] - (c(0.1, 0.2) + c(0.3, -0.4) * *t)).norm() < 1e-12);
        }
    }

    #[test]
    fn total_velocity_is_conserved() {
        let mut r = rng::seeded(17);
        for k in kernels() {
            let x: Vec<Complex64> = (0..3).map(|i| c(1.7 * i as f64, 0.3) + rng::complex_in_box(&mut r, 0.2)).collect();
            let v: Vec<Complex64> = (0..3).map(|_| rng::complex_in_box(&mut r, 0.5)).collect();
            let s = RsState::new(x, v, k.clone()).unwrap();
            let traj = rs_integrate(&s, 1.0, 1e-3).unwrap();
            assert!(traj.momentum_drift() <= 1e-9, "{}: {}", k.name(), traj.momentum_drift());
        }
    }

    #[test]
    fn collision_is_reported() {
        let s = RsState::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0); 2], RsKernel::Rational).unwrap();
        assert!(matches!(rs_integrate(&s, 1.0, 1e-3), Err(Error::Collision(_))));
    }
}
