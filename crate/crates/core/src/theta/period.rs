use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CVector;

/// Default bound on the per-axis truncation radius of the lattice sum.
pub const DEFAULT_RADIUS_CAP: usize = 64;

/// A point of the Siegel upper half space: symmetric `g x g`, `Im B > 0`.
///
/// The lattice is `Z^g + B Z^g`. Derived real data (`Im B`, its inverse and
/// smallest eigenvalue) is cached since every theta evaluation needs it.
#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    entries: DMatrix<Complex64>,
    im: DMatrix<f64>,
    im_inv: DMatrix<f64>,
    lambda_min: f64,
    lambda_max: f64,
    radius_cap: usize,
}

impl PeriodMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let g = entries.nrows();
        if g == 0 || entries.ncols() != g {
            return Err(Error::DimensionMismatch(format!(
                "period matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("period matrix has non-finite entries".into()));
        }
        let max_abs = entries.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut asym: f64 = 0.0;
        for j in 0..g {
            for k in 0..g {
                asym = asym.max((entries[(j, k)] - entries[(k, j)]).norm());
            }
        }
        if asym > 1e-12 * max_abs {
            return Err(Error::NonPosDef(format!(
                "B is not symmetric (asymmetry {asym:e})"
            )));
        }
        let im = entries.map(|c| c.im);
        let chol = im.clone().cholesky().ok_or_else(|| {
            Error::NonPosDef("Cholesky factorization of Im B failed".into())
        })?;
        if chol.l().diagonal().iter().any(|&p| !(p > 0.0)) {
            return Err(Error::NonPosDef("Im B has a non-positive pivot".into()));
        }
        let im_inv = chol.inverse();
        let eig = im.clone().symmetric_eigen().eigenvalues;
        let lambda_min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let lambda_max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(lambda_min > 0.0) {
            return Err(Error::NonPosDef("Im B is not positive definite".into()));
        }
        Ok(PeriodMatrix {
            entries,
            im,
            im_inv,
            lambda_min,
            lambda_max,
            radius_cap: DEFAULT_RADIUS_CAP,
        })
    }

    /// Build from row-major entries.
    pub fn from_rows(g: usize, rows: &[Complex64]) -> Result<Self> {
        if rows.len() != g * g {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                g * g,
                rows.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(g, g, rows))
    }

    /// Symmetrizes `entries` first; used for computed (not exact) matrices.
    pub fn new_symmetrized(entries: DMatrix<Complex64>) -> Result<Self> {
        let t = entries.transpose();
        Self::new((entries + t).map(|c| c * 0.5))
    }

    pub fn with_radius_cap(mut self, cap: usize) -> Self {
        self.radius_cap = cap;
        self
    }

    pub fn radius_cap(&self) -> usize {
        self.radius_cap
    }

    pub fn genus(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn imag(&self) -> &DMatrix<f64> {
        &self.im
    }

    pub fn imag_inverse(&self) -> &DMatrix<f64> {
        &self.im_inv
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.lambda_min
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.lambda_max
    }

    /// `factor * B`, keeping the cap.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Ok(Self::new(self.entries.map(|c| c * factor))?.with_radius_cap(self.radius_cap))
    }

    /// `n + B m`.
    pub fn lattice_vector(&self, n: &[f64], m: &[f64]) -> CVector {
        let g = self.genus();
        let nv = DVector::from_iterator(g, n.iter().map(|&x| Complex64::new(x, 0.0)));
        let mv = DVector::from_iterator(g, m.iter().map(|&x| Complex64::new(x, 0.0)));
        nv + &self.entries * mv
    }

    /// Real coordinates `(x, y)` with `z = x + B y`.
    pub fn real_coordinates(&self, z: &CVector) -> (DVector<f64>, DVector<f64>) {
        let y = &self.im_inv * z.map(|c| c.im);
        let by = &self.entries * y.map(|v| Complex64::new(v, 0.0));
        let x = (z - by).map(|c| c.re);
        (x, y)
    }

    /// Distance from `z` to the lattice, measured in `C^g` after rounding the
    /// real coordinates (checks the neighbouring cells too).
    pub fn lattice_distance(&self, z: &CVector) -> f64 {
        let g = self.genus();
        let (x, y) = self.real_coordinates(z);
        let base_n: Vec<f64> = x.iter().map(|v| v.round()).collect();
        let base_m: Vec<f64> = y.iter().map(|v| v.round()).collect();
        let mut best = f64::INFINITY;
        let combos = 3usize.pow(2 * g as u32);
        for code in 0..combos {
            let mut c = code;
            let mut n = base_n.clone();
            let mut m = base_m.clone();
            for v in n.iter_mut().chain(m.iter_mut()) {
                *v += (c % 3) as f64 - 1.0;
                c /= 3;
            }
            let d = (z - self.lattice_vector(&n, &m)).norm();
            best = best.min(d);
        }
        best
    }

    /// Block-diagonal matrices are decomposable ppavs.
    pub fn is_decomposable(&self, tol: f64) -> bool {
        let g = self.genus();
        if g < 2 {
            return false;
        }
        // connected components of the graph with edges where |B_jk| > tol
        let mut seen = vec![false; g];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(j) = stack.pop() {
            for (k, s) in seen.iter_mut().enumerate() {
                if !*s && self.entries[(j, k)].norm() > tol {
                    *s = true;
                    stack.push(k);
                }
            }
        }
        seen.iter().any(|s| !s)
    }
}

/// Half-integer characteristic `[eps, delta]`, each component in `{0, 1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaCharacteristic {
    eps: Vec<f64>,
    delta: Vec<f64>,
}

impl ThetaCharacteristic {
    pub fn zero(g: usize) -> Self {
        ThetaCharacteristic {
            eps: vec![0.0; g],
            delta: vec![0.0; g],
        }
    }

    /// Components must be half-integers; they are reduced modulo 1.
    pub fn new(eps: &[f64], delta: &[f64]) -> Result<Self> {
        if eps.len() != delta.len() {
            return Err(Error::DimensionMismatch(
                "characteristic halves differ in length".into(),
            ));
        }
        let reduce = |v: f64| -> Result<f64> {
            let twice = 2.0 * v;
            if (twice - twice.round()).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "characteristic component {v} is not a half-integer"
                )));
            }
            Ok((twice.round() as i64).rem_euclid(2) as f64 * 0.5)
        };
        Ok(ThetaCharacteristic {
            eps: eps.iter().map(|&v| reduce(v)).collect::<Result<_>>()?,
            delta: delta.iter().map(|&v| reduce(v)).collect::<Result<_>>()?,
        })
    }

    /// `eps = bits/2` with `delta = 0`; bit `j` of `index` (most significant
    /// first) gives component `j`, i.e. lexicographic order.
    pub fn level_two(g: usize, index: usize) -> Self {
        let eps = (0..g)
            .map(|j| ((index >> (g - 1 - j)) & 1) as f64 * 0.5)
            .collect();
        ThetaCharacteristic {
            eps,
            delta: vec![0.0; g],
        }
    }

    pub fn genus(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn is_zero(&self) -> bool {
        self.eps.iter().chain(&self.delta).all(|&v| v == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        let asym = PeriodMatrix::from_rows(2, &[c(0.0, 1.0), c(0.1, 0.0), c(0.2, 0.0), c(0.0, 1.0)]);
        assert!(matches!(asym, Err(Error::NonPosDef(_))));
        let indef = PeriodMatrix::from_rows(2, &[c(0.0, 1.0), c(0.0, 2.0), c(0.0, 2.0), c(0.0, 1.0)]);
        assert!(matches!(indef, Err(Error::NonPosDef(_))));
        let real = PeriodMatrix::from_rows(1, &[c(1.0, 0.0)]);
        assert!(matches!(real, Err(Error::NonPosDef(_))));
    }

    #[test]
    fn characteristic_reduction() {
        let ch = ThetaCharacteristic::new(&[1.5, -0.5], &[2.0, 0.5]).unwrap();
        assert_eq!(ch.eps(), &[0.5, 0.5]);
        assert_eq!(ch.delta(), &[0.0, 0.5]);
        assert!(ThetaCharacteristic::new(&[0.3], &[0.0]).is_err());
        assert_eq!(ThetaCharacteristic::level_two(2, 1).eps(), &[0.0, 0.5]);
        assert_eq!(ThetaCharacteristic::level_two(2, 2).eps(), &[0.5, 0.0]);
    }

    #[test]
    fn lattice_distance_of_lattice_points_is_zero() {
        let b = PeriodMatrix::from_rows(2, &[c(0.2, 1.1), c(0.3, 0.4), c(0.3, 0.4), c(-0.1, 0.9)]).unwrap();
        let v = b.lattice_vector(&[2.0, -1.0], &[1.0, 3.0]);
        assert!(b.lattice_distance(&v) < 1e-12);
        let half = b.lattice_vector(&[0.5, 0.0], &[0.0, 0.0]);
        assert!(b.lattice_distance(&half) > 0.1);
    }

    #[test]
    fn decomposability() {
        let diag = PeriodMatrix::from_rows(2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.3)]).unwrap();
        assert!(diag.is_decomposable(1e-14));
        let full = PeriodMatrix::from_rows(2, &[c(0.0, 1.0), c(0.1, 0.2), c(0.1, 0.2), c(0.0, 1.3)]).unwrap();
        assert!(!full.is_decomposable(1e-14));
    }
}
