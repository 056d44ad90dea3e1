//! Kummer map, collinearity in `CP^{2^g - 1}` and the secancy fits.
//!
//! Both fits are linear least-squares problems with `2^g` equations (one per
//! level-two characteristic) and two unknowns. Each column is kept at its own
//! log scale and normalized to unit length before the SVD solve, so neither
//! overflow nor column scaling can hide a rank deficiency.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::{level_two_with, to_common_scale, PeriodMatrix, ScaledComplex};
use crate::CVector;

/// Components below this (at the common scale) count as zero.
pub const ZERO_COMPONENT: f64 = 1e-250;
/// `sigma_2 / sigma_1` below which a design matrix is rank deficient.
pub const RANK_TOL: f64 = 1e-12;
/// Pairwise lattice distance required between `U`, `V`, `A`.
pub const DISTINCT_TOL: f64 = 1e-8;

/// Homogeneous coordinates, all at one log scale.
#[derive(Clone, Debug)]
pub struct ProjectivePoint {
    coords: Vec<ScaledComplex>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<ScaledComplex>) -> Result<Self> {
        let (m, _) = to_common_scale(&coords);
        if m.iter().all(|c| c.norm() < ZERO_COMPONENT) {
            return Err(Error::ZeroVector);
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn coords(&self) -> &[ScaledComplex] {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    /// Representative of unit Euclidean norm.
    pub fn unit(&self) -> DVector<Complex64> {
        let (m, _) = to_common_scale(&self.coords);
        let v = DVector::from_vec(m);
        let n = v.norm();
        v / Complex64::new(n, 0.0)
    }

    /// Sine of the angle between unit representatives: `|p - <q, p> q|`.
    /// Zero iff the points agree.
    pub fn distance(&self, other: &ProjectivePoint) -> Result<f64> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch("projective points of different dimension".into()));
        }
        let p = self.unit();
        let q = other.unit();
        let overlap = q.dotc(&p);
        Ok((&p - &q * overlap).norm())
    }
}

/// `Z -> (Theta[eps, 0](Z))_eps`.
pub fn kummer_map(z: &CVector, b: &PeriodMatrix) -> Result<ProjectivePoint> {
    let b2 = b.scaled(2.0)?;
    ProjectivePoint::new(level_two_with(z, &b2, None)?)
}

/// `sigma_3 / sigma_1` of the `3 x 2^g` matrix of unit rows; 0 iff collinear.
pub fn collinearity_defect(p1: &ProjectivePoint, p2: &ProjectivePoint, p3: &ProjectivePoint) -> Result<f64> {
    let n = p1.dimension();
    if p2.dimension() != n || p3.dimension() != n {
        return Err(Error::DimensionMismatch("projective points of different dimension".into()));
    }
    if n < 3 {
        return Ok(0.0);
    }
    let rows = [p1.unit(), p2.unit(), p3.unit()];
    let m = DMatrix::from_fn(3, n, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s[2] / s[0])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecancyData {
    pub u: CVector,
    pub v: CVector,
    /// `A` after the calibration shift.
    pub a: CVector,
    /// Principal logarithm of `exp_p`.
    pub p: Complex64,
    pub exp_p: ScaledComplex,
    /// Discrete fit: principal log of `exp_e`. Semidiscrete fit: `E` itself.
    pub e: Complex64,
    pub exp_e: ScaledComplex,
    pub residual: f64,
    /// Half period `(n + B m)/2` added to `A`, with `n_j` = bit `j` and `m_j` = bit `g + j`.
    pub calibration_shift: usize,
}

/// Half period with index `shift` in `{0, .., 2^{2g} - 1}`.
pub fn half_period(b: &PeriodMatrix, shift: usize) -> CVector {
    let g = b.genus();
    let n: Vec<f64> = (0..g).map(|j| ((shift >> j) & 1) as f64 * 0.5).collect();
    let m: Vec<f64> = (0..g).map(|j| ((shift >> (g + j)) & 1) as f64 * 0.5).collect();
    b.lattice_vector(&n, &m)
}

struct LinearFit {
    /// unknowns expressed as scaled values
    x: [ScaledComplex; 2],
    residual: f64,
}

/// Least squares for `c1 x1 + c2 x2 = rhs` with all vectors given at their own scales.
fn solve_two(c1: &[ScaledComplex], c2: &[ScaledComplex], rhs: &[ScaledComplex]) -> Result<LinearFit> {
    let (m1, s1) = to_common_scale(c1);
    let (m2, s2) = to_common_scale(c2);
    let (r, sr) = to_common_scale(rhs);
    let col1 = DVector::from_vec(m1);
    let col2 = DVector::from_vec(m2);
    let rhs_v = DVector::from_vec(r);
    let (n1, n2) = (col1.norm(), col2.norm());
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::RankDeficient(0.0));
    }
    let rows = col1.len();
    let mut design = DMatrix::zeros(rows, 2);
    design.set_column(0, &(&col1 / Complex64::new(n1, 0.0)));
    design.set_column(1, &(&col2 / Complex64::new(n2, 0.0)));
    let svd = design.clone().svd(true, true);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let ratio = s[1] / s[0];
    if !(ratio >= RANK_TOL) {
        return Err(Error::RankDeficient(ratio));
    }
    let y = svd
        .solve(&rhs_v, 0.0)
        .map_err(|e| Error::InvalidInput(format!("least squares: {e}")))?;
    let misfit = (&rhs_v - &design * &y).norm();
    let scale = rhs_v.norm() + y[0].norm() + y[1].norm();
    let residual = if scale > 0.0 { misfit / scale } else { 0.0 };
    Ok(LinearFit {
        x: [
            ScaledComplex::new(y[0] / n1, sr - s1),
            ScaledComplex::new(y[1] / n2, sr - s2),
        ],
        residual,
    })
}

fn check_distinct(b: &PeriodMatrix, named: &[(&str, &CVector)]) -> Result<()> {
    let g = b.genus();
    for (name, v) in named {
        if v.len() != g {
            return Err(Error::DimensionMismatch(format!("{name} has length {} for genus {g}", v.len())));
        }
    }
    for i in 0..named.len() {
        for j in 0..i {
            let d = b.lattice_distance(&(named[i].1 - named[j].1));
            if d < DISTINCT_TOL {
                return Err(Error::CoincidentPoints(format!(
                    "{} and {} agree modulo the lattice",
                    named[j].0, named[i].0
                )));
            }
        }
    }
    Ok(())
}

fn half(v: CVector) -> CVector {
    v.map(|c| c * 0.5)
}

/// Best fit over all calibration shifts; ties go to the lowest index.
fn calibrate(b: &PeriodMatrix, mut fit_one: impl FnMut(&CVector) -> Result<LinearFit>, a: &CVector) -> Result<(LinearFit, usize, CVector)> {
    let mut best: Option<(LinearFit, usize, CVector)> = None;
    let mut last_err = None;
    for shift in 0..(1usize << (2 * b.genus())) {
        let a_shift = a + half_period(b, shift);
        match fit_one(&a_shift) {
            Ok(fit) => {
                if best.as_ref().is_none_or(|(bf, _, _)| fit.residual < bf.residual) {
                    best = Some((fit, shift, a_shift));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::RankDeficient(0.0)))
}

/// Fits `Theta(X1) + e^p Theta(X2) = e^E Theta(X3)` with
/// `X1 = (A-U-V)/2`, `X2 = (A+U-V)/2`, `X3 = (A+V-U)/2`.
pub fn fit_secancy_discrete(u: &CVector, v: &CVector, a: &CVector, b: &PeriodMatrix) -> Result<SecancyData> {
    check_distinct(b, &[("U", u), ("V", v), ("A", a)])?;
    let b2 = b.scaled(2.0)?;
    let (fit, shift, a_eff) = calibrate(
        b,
        |a_s| {
            let x1 = level_two_with(&half(a_s - u - v), &b2, None)?;
            let x2 = level_two_with(&half(a_s + u - v), &b2, None)?;
            let x3 = level_two_with(&half(a_s + v - u), &b2, None)?;
            let neg3: Vec<ScaledComplex> = x3.iter().map(|c| -*c).collect();
            let rhs: Vec<ScaledComplex> = x1.iter().map(|c| -*c).collect();
            solve_two(&x2, &neg3, &rhs)
        },
        a,
    )?;
    let [exp_p, exp_e] = fit.x;
    Ok(SecancyData {
        u: u.clone(),
        v: v.clone(),
        a: a_eff,
        p: exp_p.ln(),
        exp_p,
        e: exp_e.ln(),
        exp_e,
        residual: fit.residual,
        calibration_shift: shift,
    })
}

/// Fits `d_V Theta((A-U)/2) - e^p Theta((A+U)/2) + E Theta((A-U)/2) = 0`.
pub fn fit_secancy_semidiscrete(u: &CVector, v: &CVector, a: &CVector, b: &PeriodMatrix) -> Result<SecancyData> {
    check_distinct(b, &[("U", u), ("A", a)])?;
    if v.len() != b.genus() {
        return Err(Error::DimensionMismatch("V has the wrong length".into()));
    }
    if v.norm() == 0.0 {
        return Err(Error::InvalidInput("V must be nonzero".into()));
    }
    let b2 = b.scaled(2.0)?;
    let (fit, shift, a_eff) = calibrate(
        b,
        |a_s| {
            let y1 = half(a_s - u);
            let plus = level_two_with(&half(a_s + u), &b2, None)?;
            let minus = level_two_with(&y1, &b2, None)?;
            let deriv = level_two_with(&y1, &b2, Some(v))?;
            let neg_minus: Vec<ScaledComplex> = minus.iter().map(|c| -*c).collect();
            solve_two(&plus, &neg_minus, &deriv)
        },
        a,
    )?;
    let [exp_p, e] = fit.x;
    Ok(SecancyData {
        u: u.clone(),
        v: v.clone(),
        a: a_eff,
        p: exp_p.ln(),
        exp_p,
        e: e.to_complex(),
        exp_e: ScaledComplex::exp(e.to_complex()),
        residual: fit.residual,
        calibration_shift: shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kummer_point_is_even_and_periodic() {
        let mut r = rng::seeded(3);
        let b = rng::period_matrix(&mut r, 2).unwrap();
        let z = rng::complex_vector(&mut r, 2, 0.5);
        let k = kummer_map(&z, &b).unwrap();
        assert!(k.distance(&kummer_map(&(-&z), &b).unwrap()).unwrap() < 1e-12);
        let shifted = &z + b.lattice_vector(&[1.0, 0.0], &[0.0, 1.0]);
        assert!(k.distance(&kummer_map(&shifted, &b).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn repeated_point_is_collinear() {
        let mut r = rng::seeded(4);
        let b = rng::period_matrix(&mut r, 2).unwrap();
        let p = kummer_map(&rng::complex_vector(&mut r, 2, 0.5), &b).unwrap();
        let q = kummer_map(&rng::complex_vector(&mut r, 2, 0.5), &b).unwrap();
        assert!(collinearity_defect(&p, &q, &p).unwrap() <= 1e-14);
    }

    #[test]
    fn genus_one_fits_are_square_systems() {
        let b = PeriodMatrix::from_rows(1, &[c(0.1, 1.1)]).unwrap();
        let u = CVector::from_element(1, c(0.23, 0.05));
        let v = CVector::from_element(1, c(-0.11, 0.31));
        let a = CVector::from_element(1, c(0.41, -0.2));
        let d = fit_secancy_discrete(&u, &v, &a, &b).unwrap();
        assert!(d.residual <= 1e-12, "{}", d.residual);
        let s = fit_secancy_semidiscrete(&u, &v, &a, &b).unwrap();
        assert!(s.residual <= 1e-12, "{}", s.residual);
    }

    #[test]
    fn semidiscrete_fit_scales_with_v() {
        let mut r = rng::seeded(11);
        let b = rng::period_matrix(&mut r, 2).unwrap();
        let u = rng::complex_vector(&mut r, 2, 0.4);
        let v = rng::complex_vector(&mut r, 2, 0.4);
        let a = rng::complex_vector(&mut r, 2, 0.4);
        let base = fit_secancy_semidiscrete(&u, &v, &a, &b).unwrap();
        let lam = 1.7;
        let scaled = fit_secancy_semidiscrete(&u, &v.map(|x| x * lam), &a, &b).unwrap();
        let ep = (scaled.exp_p.to_complex() - base.exp_p.to_complex() * lam).norm();
        assert!(ep <= 1e-8 * base.exp_p.abs() * lam, "{ep}");
        assert!((scaled.e - base.e * lam).norm() <= 1e-8 * base.e.norm() * lam);
        assert!((scaled.residual - base.residual).abs() <= 1e-10);
    }

    #[test]
    fn coincident_vectors_are_rejected() {
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        let u = CVector::from_element(1, c(0.2, 0.0));
        let a = CVector::from_element(1, c(1.2, 1.0));
        assert!(matches!(
            fit_secancy_discrete(&u, &CVector::from_element(1, c(0.3, 0.1)), &a, &b),
            Err(Error::CoincidentPoints(_))
        ));
    }
}
