//! Points of the theta divisor and the identities that hold on it.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{self, Rect};
use crate::rng;
use crate::theta::{
    envelope, theta_at_radius, theta_jet, theta_value, theta_with_derivative, truncation_radius, PeriodMatrix,
    ScaledComplex, ThetaCharacteristic, ThetaRequest, REL_FLOOR,
};
use crate::CVector;

/// Normalized `|theta|` accepted as a divisor point.
pub const DIVISOR_TOL: f64 = 1e-10;
/// Minimum lattice distance between returned samples.
pub const SAMPLE_SEPARATION: f64 = 1e-6;
pub const MAX_SAMPLES: usize = 10_000;
/// Default depth of the singular-locus probe.
pub const DEFAULT_PROBE_DEPTH: usize = 10;

const GRID_CELLS: usize = 8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivisorSample {
    pub z: CVector,
    /// `|theta(Z)| exp(-pi Im Z^T (Im B)^-1 Im Z)`.
    pub theta_abs: f64,
    /// Seed of the line the sample was found on.
    pub line_seed: u64,
}

fn check_len(b: &PeriodMatrix, vs: &[&CVector]) -> Result<()> {
    if vs.iter().any(|v| v.len() != b.genus()) {
        return Err(Error::DimensionMismatch(format!("expected vectors of length {}", b.genus())));
    }
    Ok(())
}

/// `count` distinct zeros of theta, found on seeded random lines `Z0 + s D`,
/// `s` in `[-1, 1]^2`.
pub fn sample_theta_divisor(b: &PeriodMatrix, seed: u64, count: usize) -> Result<Vec<DivisorSample>> {
    if count > MAX_SAMPLES {
        return Err(Error::InvalidInput(format!("at most {MAX_SAMPLES} divisor samples")));
    }
    let g = b.genus();
    let zero = ThetaCharacteristic::zero(g);
    let mut master = rng::seeded(seed);
    let mut out: Vec<DivisorSample> = Vec::with_capacity(count);
    let square = Rect::new(Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0));
    for _ in 0..100 * count {
        if out.len() == count {
            break;
        }
        let line_seed: u64 = master.gen();
        let mut lr = rng::seeded(line_seed);
        let x: Vec<f64> = (0..g).map(|_| lr.gen_range(0.0..1.0)).collect();
        let y: Vec<f64> = (0..g).map(|_| lr.gen_range(0.0..1.0)).collect();
        let z0 = b.lattice_vector(&x, &y);
        let raw = rng::complex_vector(&mut lr, g, 1.0);
        let dir = &raw / Complex64::new(raw.norm(), 0.0);

        let f = |s: Complex64| -> Result<ScaledComplex> { Ok(theta_value(b, &(&z0 + &dir * s))?.value) };
        let f_df = |s: Complex64| theta_with_derivative(b, &(&z0 + &dir * s), &zero, &dir);
        for (cell, _) in roots::bracket_zeros(&f, &square, GRID_CELLS)? {
            let Some(s) = roots::newton(&f_df, cell.center())? else {
                continue;
            };
            if !square.contains(s, 0.5) {
                continue;
            }
            let z = &z0 + &dir * s;
            let theta_abs = theta_value(b, &z)?.normalized_abs();
            if theta_abs > DIVISOR_TOL {
                continue;
            }
            if out.iter().any(|o| b.lattice_distance(&(&o.z - &z)) <= SAMPLE_SEPARATION) {
                continue;
            }
            out.push(DivisorSample { z, theta_abs, line_seed });
            if out.len() == count {
                break;
            }
        }
    }
    if out.len() < count {
        return Err(Error::RootSearchFailed {
            found: out.len(),
            wanted: count,
        });
    }
    Ok(out)
}

/// Normalized `|theta(Z)|` recomputed with twice the certified truncation radius.
pub fn reverify_sample(b: &PeriodMatrix, sample: &DivisorSample) -> Result<f64> {
    let r = truncation_radius(b, &sample.z, crate::theta::DEFAULT_TOL)?;
    let value = theta_at_radius(&ThetaRequest::new(b, sample.z.clone()), 2 * r)?;
    if value.is_zero() {
        return Ok(0.0);
    }
    Ok((value.ln_abs() - envelope(b, &sample.z)).exp())
}

/// `|LHS - RHS| / (|LHS| + |RHS| + floor)` for
/// `d_V[theta(Z+U) theta(Z-U)] d_V theta(Z) = theta(Z+U) theta(Z-U) d_VV theta(Z)`.
pub fn residual_cm7(zs: &DivisorSample, u: &CVector, v: &CVector, b: &PeriodMatrix) -> Result<f64> {
    check_len(b, &[&zs.z, u, v])?;
    let zero = ThetaCharacteristic::zero(b.genus());
    let (tp, dtp) = theta_with_derivative(b, &(&zs.z + u), &zero, v)?;
    let (tm, dtm) = theta_with_derivative(b, &(&zs.z - u), &zero, v)?;
    let jet = theta_jet(b, &zs.z, &zero, v, v)?;
    let lhs = (dtp * tm + tp * dtm) * jet.du;
    let rhs = tp * tm * jet.duu;
    Ok(relative_difference(lhs, rhs))
}

fn relative_difference(lhs: ScaledComplex, rhs: ScaledComplex) -> f64 {
    let diff = lhs - rhs;
    let (m, _) = crate::theta::to_common_scale(&[diff, lhs, rhs]);
    m[0].norm() / (m[1].norm() + m[2].norm() + REL_FLOOR)
}

/// Relative residual of
/// `theta(Z+U) theta(Z-V) theta(Z-U+V) + theta(Z-U) theta(Z+V) theta(Z+U-V) = 0`.
pub fn residual_cm7d(zs: &DivisorSample, u: &CVector, v: &CVector, b: &PeriodMatrix) -> Result<f64> {
    check_len(b, &[&zs.z, u, v])?;
    let z = &zs.z;
    let t = |w: CVector| -> Result<ScaledComplex> { Ok(theta_value(b, &w)?.value) };
    let first = t(z + u)? * t(z - v)? * t(z - u + v)?;
    let second = t(z - u)? * t(z + v)? * t(z + u - v)?;
    Ok(crate::theta::relative_sum_residual(&[first, second], REL_FLOOR))
}

/// `max_{|k| <= depth}` of the normalized `|theta(Z + k (U - V))|`.
pub fn singular_locus_probe(zs: &DivisorSample, u: &CVector, v: &CVector, b: &PeriodMatrix, depth: usize) -> Result<f64> {
    check_len(b, &[&zs.z, u, v])?;
    let step = u - v;
    let k = depth as i64;
    let mut best: f64 = 0.0;
    for j in -k..=k {
        let w = &zs.z + &step * Complex64::new(j as f64, 0.0);
        best = best.max(theta_value(b, &w)?.normalized_abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn genus_one_divisor_is_the_odd_half_period() {
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        let samples = sample_theta_divisor(&b, 3, 1).unwrap();
        let half = CVector::from_element(1, c(0.5, 0.5));
        for s in &samples {
            assert!(b.lattice_distance(&(&s.z - &half)) < 1e-8);
            assert!(reverify_sample(&b, s).unwrap() <= DIVISOR_TOL);
        }
        assert!(sample_theta_divisor(&b, 3, 0).unwrap().is_empty());
    }

    #[test]
    fn genus_one_three_term_identity() {
        let b = PeriodMatrix::from_rows(1, &[c(0.2, 1.1)]).unwrap();
        let z = CVector::from_element(1, c(0.6, 0.55));
        let zs = DivisorSample { z, theta_abs: 0.0, line_seed: 0 };
        let mut r = rng::seeded(9);
        for _ in 0..5 {
            let u = rng::complex_vector(&mut r, 1, 0.5);
            let v = rng::complex_vector(&mut r, 1, 0.5);
            assert!(residual_cm7d(&zs, &u, &v, &b).unwrap() <= 1e-10);
            assert_eq!(residual_cm7(&zs, &u, &CVector::zeros(1), &b).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_depth_probe_is_the_sample_itself() {
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        let s = &sample_theta_divisor(&b, 5, 1).unwrap()[0];
        let u = CVector::from_element(1, c(0.3, 0.0));
        assert!(singular_locus_probe(s, &u, &u, &b, 0).unwrap() <= 1e-10);
        assert!(singular_locus_probe(s, &u, &u, &b, 4).unwrap() <= 1e-10);
    }
}
