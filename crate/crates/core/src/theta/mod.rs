//! Riemann theta functions with characteristics.
//!
//! `theta[eps, delta](z | B) = sum_m exp(pi i (m+eps)^T B (m+eps) + 2 pi i (m+eps)^T (z+delta))`.
//!
//! Evaluation first moves `z` into the cell around the origin by a lattice
//! translation `z = z' + B n + k`; the quasi-periodicity factor is carried in
//! the log scale of the result. The reduced sum is then taken over an
//! axis-aligned box whose half-width comes from a Gaussian tail bound driven
//! by the smallest eigenvalue of `Im B`. Directional derivatives are applied
//! termwise: every derivative along `d` multiplies term `m` by
//! `2 pi i d^T (m + eps)` (with `m` the index of the unreduced sum).

mod period;
mod scaled;

pub use period::{PeriodMatrix, ThetaCharacteristic, DEFAULT_RADIUS_CAP};
pub use scaled::{common_logscale, relative_sum_residual, to_common_scale, ScaledComplex};

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CVector;

/// Default absolute truncation tolerance on the scaled mantissa.
pub const DEFAULT_TOL: f64 = 1e-15;

/// Floor used by every relative comparison in the crate.
pub const REL_FLOOR: f64 = 1e-300;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One theta evaluation: argument, matrix, characteristic, up to two
/// derivative directions and a truncation tolerance.
#[derive(Clone, Debug)]
pub struct ThetaRequest<'a> {
    pub z: CVector,
    pub b: &'a PeriodMatrix,
    pub ch: ThetaCharacteristic,
    pub deriv_dirs: Vec<CVector>,
    pub tol: f64,
}

impl<'a> ThetaRequest<'a> {
    pub fn new(b: &'a PeriodMatrix, z: CVector) -> Self {
        ThetaRequest {
            ch: ThetaCharacteristic::zero(b.genus()),
            z,
            b,
            deriv_dirs: Vec::new(),
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_char(mut self, ch: ThetaCharacteristic) -> Self {
        self.ch = ch;
        self
    }

    pub fn with_deriv(mut self, dir: CVector) -> Self {
        self.deriv_dirs.push(dir);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.b.genus();
        if self.z.len() != g || self.ch.genus() != g {
            return Err(Error::DimensionMismatch(format!(
                "argument/characteristic length does not match genus {g}"
            )));
        }
        if self.deriv_dirs.len() > 2 {
            return Err(Error::InvalidInput("at most two derivative directions".into()));
        }
        if self.deriv_dirs.iter().any(|d| d.len() != g) {
            return Err(Error::DimensionMismatch("derivative direction length".into()));
        }
        if !(1e-16..=1e-4).contains(&self.tol) {
            return Err(Error::InvalidInput(format!(
                "tolerance {:e} outside [1e-16, 1e-4]",
                self.tol
            )));
        }
        if self.z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite theta argument".into()));
        }
        Ok(())
    }
}

/// A theta value together with the Gaussian envelope `pi Im(z)^T (Im B)^-1 Im(z)`.
///
/// `|theta| * exp(-envelope)` is invariant under lattice translations of `z`
/// (for the zero characteristic) and bounded, which makes it the natural
/// "scale-normalized modulus".
#[derive(Clone, Copy, Debug)]
pub struct ThetaEval {
    pub value: ScaledComplex,
    pub envelope: f64,
}

impl ThetaEval {
    pub fn normalized_abs(&self) -> f64 {
        if self.value.is_zero() {
            0.0
        } else {
            (self.value.ln_abs() - self.envelope).exp()
        }
    }
}

/// Value and all first/second derivatives along two directions, sharing one scale.
#[derive(Clone, Copy, Debug)]
pub struct ThetaJet {
    pub value: ScaledComplex,
    pub du: ScaledComplex,
    pub dv: ScaledComplex,
    pub duu: ScaledComplex,
    pub duv: ScaledComplex,
    pub dvv: ScaledComplex,
    pub envelope: f64,
}

impl ThetaJet {
    pub fn normalized_abs(&self) -> f64 {
        ThetaEval {
            value: self.value,
            envelope: self.envelope,
        }
        .normalized_abs()
    }
}

pub fn envelope(b: &PeriodMatrix, z: &CVector) -> f64 {
    let im = z.map(|c| c.im);
    PI * im.dot(&(b.imag_inverse() * &im))
}

/// Tail bound of the box sum, relative to the Gaussian peak, for half-width `radius`.
fn tail_bound(b: &PeriodMatrix, radius: usize, order: usize, dir_scale: f64, shift: f64) -> f64 {
    let g = b.genus() as i32;
    let lambda = b.min_eigenvalue();
    // the largest box term can sit up to half a cell away from the peak
    let peak_gap = (PI * b.max_eigenvalue() * g as f64 / 4.0).exp();
    let mut total = 0.0;
    for s in (radius + 1)..(radius + 400) {
        let sf = s as f64;
        let shell = (2.0 * sf + 1.0).powi(g) - (2.0 * sf - 1.0).powi(g);
        let dist = sf - 1.0;
        let gauss = (-PI * lambda * dist * dist).exp();
        let poly = (2.0 * PI * dir_scale * (g as f64).sqrt() * (sf + 1.0 + shift)).powi(order as i32);
        let term = shell * gauss * poly * peak_gap;
        total += term;
        if term < 1e-3 * total * f64::EPSILON || term == 0.0 {
            break;
        }
    }
    total
}

fn radius_for(
    b: &PeriodMatrix,
    tol: f64,
    order: usize,
    dir_scale: f64,
    shift: f64,
) -> Result<usize> {
    let cap = b.radius_cap();
    for r in 1..=cap {
        if tail_bound(b, r, order, dir_scale, shift) < tol {
            return Ok(r);
        }
    }
    // report how far we would have needed to go
    let mut needed = cap + 1;
    while needed < 100_000 && tail_bound(b, needed, order, dir_scale, shift) >= tol {
        needed = (needed as f64 * 1.25).ceil() as usize;
    }
    Err(Error::RadiusCap { needed, cap })
}

/// Lattice translation moving `z` next to the origin: `z = z' + B n + k`.
struct Reduction {
    z_red: CVector,
    n: Vec<f64>,
    log_factor: Complex64,
    /// peak of `m + eps` in the reduced sum
    center: Vec<f64>,
}

fn reduce(b: &PeriodMatrix, z: &CVector, ch: &ThetaCharacteristic) -> Reduction {
    let g = b.genus();
    let (_, y) = b.real_coordinates(z);
    let n: Vec<f64> = y.iter().map(|v| v.round()).collect();
    let n_c = DVector::from_iterator(g, n.iter().map(|&v| Complex64::new(v, 0.0)));
    let z1 = z - b.entries() * &n_c;
    let k: Vec<f64> = z1.iter().map(|c| c.re.round()).collect();
    let z_red = DVector::from_iterator(g, z1.iter().zip(&k).map(|(c, kk)| c - kk));
    let nbn = n_c.dot(&(b.entries() * &n_c));
    let mut log_factor = I * PI * nbn;
    for j in 0..g {
        log_factor += 2.0 * PI * I * ch.eps()[j] * k[j];
        log_factor -= 2.0 * PI * I * n[j] * (z[j] + ch.delta()[j]);
    }
    let center = (0..g).map(|j| -(y[j] - n[j])).collect();
    Reduction {
        z_red,
        n,
        log_factor,
        center,
    }
}

/// Core box summation. `products[i]` lists the derivative directions applied
/// to output `i`. All outputs share the quasi-periodicity factor.
fn lattice_sum(
    b: &PeriodMatrix,
    z: &CVector,
    ch: &ThetaCharacteristic,
    dirs: &[&CVector],
    products: &[&[usize]],
    tol: f64,
    forced_radius: Option<usize>,
) -> Result<Vec<ScaledComplex>> {
    let g = b.genus();
    let red = reduce(b, z, ch);
    let order = products.iter().map(|p| p.len()).max().unwrap_or(0);
    let dir_scale = dirs.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let shift = red.n.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let radius = match forced_radius {
        Some(r) => r,
        None => radius_for(b, tol, order, dir_scale, shift)?,
    } as i64;

    let base: Vec<i64> = (0..g)
        .map(|j| (red.center[j] - ch.eps()[j]).round() as i64)
        .collect();
    let width = (2 * radius + 1) as usize;
    let count = width.pow(g as u32);

    let entries = b.entries();
    let shifted: Vec<Complex64> = (0..g).map(|j| red.z_red[j] + ch.delta()[j]).collect();
    let mut exponents = Vec::with_capacity(count);
    let mut qs = Vec::with_capacity(count);
    let mut q = vec![0.0f64; g];
    for code in 0..count {
        let mut c = code;
        for j in 0..g {
            q[j] = (base[j] + (c % width) as i64 - radius) as f64 + ch.eps()[j];
            c /= width;
        }
        let mut quad = Complex64::new(0.0, 0.0);
        let mut lin = Complex64::new(0.0, 0.0);
        for j in 0..g {
            let mut row = Complex64::new(0.0, 0.0);
            for k in 0..g {
                row += entries[(j, k)] * q[k];
            }
            quad += row * q[j];
            lin += shifted[j] * q[j];
        }
        exponents.push(I * PI * quad + 2.0 * PI * I * lin);
        qs.extend_from_slice(&q);
    }
    let peak = exponents.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);

    let mut sums = vec![Complex64::new(0.0, 0.0); products.len()];
    let mut lin_factors = vec![Complex64::new(0.0, 0.0); dirs.len()];
    for (idx, e) in exponents.iter().enumerate() {
        let term = (e - peak).exp();
        let qrow = &qs[idx * g..(idx + 1) * g];
        for (f, d) in lin_factors.iter_mut().zip(dirs) {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..g {
                acc += d[j] * (qrow[j] - red.n[j]);
            }
            *f = 2.0 * PI * I * acc;
        }
        for (s, p) in sums.iter_mut().zip(products) {
            let mut t = term;
            for &k in p.iter() {
                t *= lin_factors[k];
            }
            *s += t;
        }
    }
    let phase = Complex64::from_polar(1.0, red.log_factor.im);
    let logscale = peak + red.log_factor.re;
    Ok(sums
        .into_iter()
        .map(|s| ScaledComplex::new(s * phase, logscale))
        .collect())
}

fn check_vec(b: &PeriodMatrix, z: &CVector) -> Result<()> {
    if z.len() != b.genus() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for genus {}",
            z.len(),
            b.genus()
        )));
    }
    if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite theta argument".into()));
    }
    Ok(())
}

/// Half-width of the summation box needed for `tol` (no derivatives).
pub fn truncation_radius(b: &PeriodMatrix, z: &CVector, tol: f64) -> Result<usize> {
    check_vec(b, z)?;
    if !(1e-16..=1e-4).contains(&tol) {
        return Err(Error::InvalidInput(format!("tolerance {tol:e} outside [1e-16, 1e-4]")));
    }
    let red = reduce(b, z, &ThetaCharacteristic::zero(b.genus()));
    let shift = red.n.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    radius_for(b, tol, 0, 0.0, shift)
}

pub fn theta_eval(req: &ThetaRequest<'_>) -> Result<ThetaEval> {
    req.validate()?;
    let dirs: Vec<&CVector> = req.deriv_dirs.iter().collect();
    let prod: Vec<usize> = (0..dirs.len()).collect();
    let v = lattice_sum(req.b, &req.z, &req.ch, &dirs, &[&prod], req.tol, None)?;
    Ok(ThetaEval {
        value: v[0],
        envelope: envelope(req.b, &req.z),
    })
}

/// `theta[eps, delta](z | B)` with the requested directional derivatives applied.
pub fn theta(req: &ThetaRequest<'_>) -> Result<ScaledComplex> {
    theta_eval(req).map(|e| e.value)
}

/// Same sum with an explicit box half-width (for truncation studies).
pub fn theta_at_radius(req: &ThetaRequest<'_>, radius: usize) -> Result<ScaledComplex> {
    req.validate()?;
    let dirs: Vec<&CVector> = req.deriv_dirs.iter().collect();
    let prod: Vec<usize> = (0..dirs.len()).collect();
    lattice_sum(req.b, &req.z, &req.ch, &dirs, &[&prod], req.tol, Some(radius)).map(|v| v[0])
}

/// Plain `theta(z | B)`.
pub fn theta_value(b: &PeriodMatrix, z: &CVector) -> Result<ThetaEval> {
    check_vec(b, z)?;
    let v = lattice_sum(b, z, &ThetaCharacteristic::zero(b.genus()), &[], &[&[]], DEFAULT_TOL, None)?;
    Ok(ThetaEval {
        value: v[0],
        envelope: envelope(b, z),
    })
}

/// `theta(z)` and `d_dir theta(z)` in one pass.
pub fn theta_with_derivative(
    b: &PeriodMatrix,
    z: &CVector,
    ch: &ThetaCharacteristic,
    dir: &CVector,
) -> Result<(ScaledComplex, ScaledComplex)> {
    check_vec(b, z)?;
    check_vec(b, dir)?;
    let v = lattice_sum(b, z, ch, &[dir], &[&[], &[0]], DEFAULT_TOL, None)?;
    Ok((v[0], v[1]))
}

/// Value, gradient along `u`,`v` and the Hessian entries, all in one sum.
pub fn theta_jet(
    b: &PeriodMatrix,
    z: &CVector,
    ch: &ThetaCharacteristic,
    u: &CVector,
    v: &CVector,
) -> Result<ThetaJet> {
    check_vec(b, z)?;
    check_vec(b, u)?;
    check_vec(b, v)?;
    let out = lattice_sum(
        b,
        z,
        ch,
        &[u, v],
        &[&[], &[0], &[1], &[0, 0], &[0, 1], &[1, 1]],
        DEFAULT_TOL,
        None,
    )?;
    Ok(ThetaJet {
        value: out[0],
        du: out[1],
        dv: out[2],
        duu: out[3],
        duv: out[4],
        dvv: out[5],
        envelope: envelope(b, z),
    })
}

/// Compares analytic directional derivatives with central differences of step `h`.
///
/// Returns `|analytic - fd| / (|analytic| + |fd| + 1e-300)`.
pub fn theta_fd_check(req: &ThetaRequest<'_>, h: f64) -> Result<f64> {
    req.validate()?;
    if req.deriv_dirs.is_empty() {
        return Err(Error::InvalidInput("finite-difference check needs a direction".into()));
    }
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidInput(format!("step {h:e} outside [1e-6, 1e-3]")));
    }
    let analytic = theta(req)?;
    let at = |z: CVector| -> Result<ScaledComplex> {
        theta(&ThetaRequest {
            z,
            b: req.b,
            ch: req.ch.clone(),
            deriv_dirs: Vec::new(),
            tol: req.tol,
        })
    };
    let fd = match req.deriv_dirs.as_slice() {
        [d] => {
            let plus = at(&req.z + d.map(|c| c * h))?;
            let minus = at(&req.z - d.map(|c| c * h))?;
            (plus - minus).scale(Complex64::new(1.0 / (2.0 * h), 0.0))
        }
        [d1, d2] => {
            let a = d1.map(|c| c * h);
            let c = d2.map(|c| c * h);
            let pp = at(&req.z + &a + &c)?;
            let pm = at(&req.z + &a - &c)?;
            let mp = at(&req.z - &a + &c)?;
            let mm = at(&req.z - &a - &c)?;
            (pp - pm - mp + mm).scale(Complex64::new(1.0 / (4.0 * h * h), 0.0))
        }
        _ => unreachable!("validated above"),
    };
    let (m, _) = to_common_scale(&[analytic, fd]);
    Ok((m[0] - m[1]).norm() / (m[0].norm() + m[1].norm() + REL_FLOOR))
}

/// Second-order theta functions `Theta[eps,0](Z) = theta[eps,0](2Z | 2B)`, eps in
/// lexicographic order, all expressed at one common log scale.
pub fn level_two_vector(z: &CVector, b: &PeriodMatrix) -> Result<Vec<ScaledComplex>> {
    let b2 = b.scaled(2.0)?;
    level_two_with(z, &b2, None)
}

/// As [`level_two_vector`] with a precomputed `2B`; optionally also returns
/// the derivative along `dir` (in the `Z` variable).
pub(crate) fn level_two_with(
    z: &CVector,
    b2: &PeriodMatrix,
    dir: Option<&CVector>,
) -> Result<Vec<ScaledComplex>> {
    check_vec(b2, z)?;
    let g = b2.genus();
    let z2 = z.map(|c| c * 2.0);
    let mut out = Vec::with_capacity(1 << g);
    for idx in 0..(1usize << g) {
        let ch = ThetaCharacteristic::level_two(g, idx);
        match dir {
            None => out.extend(lattice_sum(b2, &z2, &ch, &[], &[&[]], DEFAULT_TOL, None)?),
            Some(d) => {
                let d2 = d.map(|c| c * 2.0);
                out.extend(lattice_sum(b2, &z2, &ch, &[&d2], &[&[0]], DEFAULT_TOL, None)?)
            }
        }
    }
    let scale = common_logscale(&out);
    Ok(out
        .into_iter()
        .map(|v| ScaledComplex::new(v.at_scale(scale), scale))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn v(xs: &[Complex64]) -> CVector {
        DVector::from_column_slice(xs)
    }

    /// Straight sum over |m| <= r for g = 1, no reduction.
    fn naive_g1(tau: Complex64, z: Complex64, r: i64) -> Complex64 {
        (-r..=r)
            .map(|m| {
                let m = m as f64;
                (I * PI * tau * m * m + 2.0 * PI * I * z * m).exp()
            })
            .sum()
    }

    #[test]
    fn square_lattice_value() {
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        let oracle = naive_g1(c(0.0, 1.0), c(0.0, 0.0), 8);
        let got = theta_value(&b, &v(&[c(0.0, 0.0)])).unwrap().value.to_complex();
        assert!((got - oracle).norm() < 1e-14);
        assert!((got.re - 1.086_434_811_213_308).abs() < 1e-12);
    }

    #[test]
    fn radius_matches_direct_oracle() {
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        let z = v(&[c(0.0, 0.0)]);
        let r = truncation_radius(&b, &z, 1e-14).unwrap();
        // smallest r whose partial sum is within 1e-14 of the r+4 partial sum
        let oracle = (1..20)
            .find(|&r| (naive_g1(c(0.0, 1.0), c(0.0, 0.0), r + 4) - naive_g1(c(0.0, 1.0), c(0.0, 0.0), r)).norm() < 1e-14)
            .unwrap();
        assert!(r >= oracle as usize, "bound {r} below oracle {oracle}");
        assert!((4..=8).contains(&r), "radius {r}");
        let loose = truncation_radius(&b, &z, 1e-6).unwrap();
        assert!(loose <= r);
    }

    #[test]
    fn thin_lattice_hits_the_cap() {
        // Im B = 0.01: the Gaussian bound lands around 35, inside the default cap
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 0.01)]).unwrap();
        let r = truncation_radius(&b, &v(&[c(0.0, 0.0)]), 1e-14).unwrap();
        assert!((30..=40).contains(&r), "radius {r}");
        let tight = b.clone().with_radius_cap(20);
        assert!(matches!(
            truncation_radius(&tight, &v(&[c(0.0, 0.0)]), 1e-14),
            Err(Error::RadiusCap { cap: 20, .. })
        ));
        let thinner = PeriodMatrix::from_rows(1, &[c(0.0, 0.001)]).unwrap();
        assert!(matches!(
            truncation_radius(&thinner, &v(&[c(0.0, 0.0)]), 1e-14),
            Err(Error::RadiusCap { cap: 64, .. })
        ));
    }

    #[test]
    fn odd_half_period_is_a_zero() {
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        let e = theta_value(&b, &v(&[c(0.5, 0.5)])).unwrap();
        assert!(e.normalized_abs() < 1e-10);
    }

    #[test]
    fn far_arguments_match_quasi_periodicity() {
        let tau = c(0.3, 1.2);
        let b = PeriodMatrix::from_rows(1, &[tau]).unwrap();
        let z = c(0.17, -0.21);
        let base = theta_value(&b, &v(&[z])).unwrap().value;
        let shifted = theta_value(&b, &v(&[z + tau * 7.0 - 3.0])).unwrap().value;
        // theta(z + n tau) = exp(-pi i n^2 tau - 2 pi i n z) theta(z)
        let factor = ScaledComplex::exp(-I * PI * 49.0 * tau - 2.0 * PI * I * 7.0 * z);
        let expect = base * factor;
        let rel = relative_sum_residual(&[shifted, -expect], REL_FLOOR);
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn characteristic_shift_identity() {
        // theta[1/2,1/2](z) = exp(pi i tau/4 + pi i (z + 1/2)) theta(z + 1/2 + tau/2)
        let tau = c(-0.2, 0.9);
        let b = PeriodMatrix::from_rows(1, &[tau]).unwrap();
        let z = c(0.13, 0.07);
        let ch = ThetaCharacteristic::new(&[0.5], &[0.5]).unwrap();
        let lhs = theta(&ThetaRequest::new(&b, v(&[z])).with_char(ch)).unwrap();
        let rhs = theta_value(&b, &v(&[z + 0.5 + tau * 0.5])).unwrap().value
            * ScaledComplex::exp(I * PI * tau / 4.0 + I * PI * (z + 0.5));
        assert!(relative_sum_residual(&[lhs, -rhs], REL_FLOOR) < 1e-13);
    }

    #[test]
    fn jet_agrees_with_single_requests() {
        let b = PeriodMatrix::from_rows(2, &[c(0.1, 1.0), c(0.2, 0.3), c(0.2, 0.3), c(-0.3, 1.4)]).unwrap();
        let z = v(&[c(0.3, 0.8), c(-1.2, 0.4)]);
        let u = v(&[c(1.0, 0.2), c(-0.4, 0.1)]);
        let w = v(&[c(0.3, -0.5), c(0.7, 0.0)]);
        let jet = theta_jet(&b, &z, &ThetaCharacteristic::zero(2), &u, &w).unwrap();
        let single = theta(&ThetaRequest::new(&b, z.clone()).with_deriv(u.clone()).with_deriv(w.clone())).unwrap();
        assert!(relative_sum_residual(&[jet.duv, -single], REL_FLOOR) < 1e-13);
        let fd = theta_fd_check(&ThetaRequest::new(&b, z.clone()).with_deriv(u.clone()).with_deriv(w.clone()), 1e-3).unwrap();
        assert!(fd < 1e-5, "{fd}");
    }

    #[test]
    fn request_validation() {
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        let z = v(&[c(0.0, 0.0)]);
        assert!(theta(&ThetaRequest::new(&b, z.clone()).with_tol(1e-3)).is_err());
        let r = ThetaRequest::new(&b, z.clone())
            .with_deriv(z.clone())
            .with_deriv(z.clone())
            .with_deriv(z.clone());
        assert!(theta(&r).is_err());
        assert!(theta_fd_check(&ThetaRequest::new(&b, z), 1e-4).is_err());
    }

    #[test]
    fn level_two_components_positive_at_origin() {
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        let k = level_two_vector(&v(&[c(0.0, 0.0)]), &b).unwrap();
        let oracle0 = naive_g1(c(0.0, 2.0), c(0.0, 0.0), 10);
        let oracle1: Complex64 = (-10..=10)
            .map(|m| {
                let q = m as f64 + 0.5;
                (I * PI * c(0.0, 2.0) * q * q).exp()
            })
            .sum();
        let (m, s) = to_common_scale(&k);
        assert!((m[0] * s.exp() - oracle0).norm() < 1e-14);
        assert!((m[1] * s.exp() - oracle1).norm() < 1e-14);
        assert!(m[0].re > 0.0 && m[1].re > 0.0);
        assert!(m[0].im.abs() < 1e-15 && m[1].im.abs() < 1e-15);
    }
}
