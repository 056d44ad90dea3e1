//! Theta-functional solutions of the semi-discrete Toda linear problem
//! `(d_t - T + u) psi = 0` and of the discrete Hirota linear problem
//! `psi(m, n+1) = psi(m+1, n) + u(m, n) psi(m, n)` on finite windows.
//!
//! Tables cover the window exactly; residuals are taken over the points whose
//! forward neighbours lie in the window.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::{theta_value, theta_with_derivative, PeriodMatrix, ScaledComplex, ThetaCharacteristic, REL_FLOOR};
use crate::CVector;

/// Normalized `|theta|` below which a window point counts as a divisor hit.
pub const DIVISOR_HIT: f64 = 1e-12;
pub const MAX_WINDOW: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableKind {
    Toda,
    Bdhe,
}

/// Window of lattice points: `first` runs over integers (`x` or `m`), `second`
/// over `t` samples (Toda) or integers `n` (BDHE).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeWindow {
    pub kind: TableKind,
    pub first: (i64, i64),
    pub second: Vec<f64>,
    pub z: CVector,
}

impl LatticeWindow {
    pub fn toda(x_range: (i64, i64), t_samples: Vec<f64>, z: CVector) -> Result<Self> {
        Self::validated(TableKind::Toda, x_range, t_samples, z)
    }

    pub fn bdhe(m_range: (i64, i64), n_range: (i64, i64), z: CVector) -> Result<Self> {
        if n_range.1 < n_range.0 {
            return Err(Error::InvalidInput("empty n range".into()));
        }
        let second = (n_range.0..=n_range.1).map(|n| n as f64).collect();
        Self::validated(TableKind::Bdhe, m_range, second, z)
    }

    fn validated(kind: TableKind, first: (i64, i64), second: Vec<f64>, z: CVector) -> Result<Self> {
        if first.1 < first.0 || second.is_empty() {
            return Err(Error::InvalidInput("empty lattice window".into()));
        }
        let cols = (first.1 - first.0 + 1) as usize;
        if cols > MAX_WINDOW || second.len() > MAX_WINDOW {
            return Err(Error::InvalidInput(format!("window larger than {MAX_WINDOW}x{MAX_WINDOW}")));
        }
        if second.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("non-finite window coordinate".into()));
        }
        Ok(LatticeWindow { kind, first, second, z })
    }

    pub fn cols(&self) -> usize {
        (self.first.1 - self.first.0 + 1) as usize
    }

    /// Same window with the base point moved by `dz` and the integer index by `di`.
    pub fn shifted(&self, dz: &CVector, di: i64) -> Self {
        LatticeWindow {
            kind: self.kind,
            first: (self.first.0 + di, self.first.1 + di),
            second: self.second.clone(),
            z: &self.z + dz,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldEntry {
    pub u: ScaledComplex,
    /// `-d_t ln tau` (Toda only).
    pub v: ScaledComplex,
    pub psi: ScaledComplex,
    /// `d_t psi` (Toda only).
    pub dpsi: ScaledComplex,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldTable {
    pub kind: TableKind,
    pub first: (i64, i64),
    pub second: Vec<f64>,
    /// Row-major: `entries[j * cols + i]` is first index `first.0 + i`, second sample `j`.
    entries: Vec<FieldEntry>,
}

impl FieldTable {
    /// Table from an explicit field function (constant-coefficient checks).
    pub fn from_fn(window: &LatticeWindow, mut f: impl FnMut(i64, f64) -> FieldEntry) -> Self {
        let mut entries = Vec::with_capacity(window.cols() * window.second.len());
        for &s in &window.second {
            for i in window.first.0..=window.first.1 {
                entries.push(f(i, s));
            }
        }
        FieldTable {
            kind: window.kind,
            first: window.first,
            second: window.second.clone(),
            entries,
        }
    }

    pub fn cols(&self) -> usize {
        (self.first.1 - self.first.0 + 1) as usize
    }

    pub fn rows(&self) -> usize {
        self.second.len()
    }

    /// Entry at column offset `i` and row `j`.
    pub fn at(&self, i: usize, j: usize) -> &FieldEntry {
        &self.entries[j * self.cols() + i]
    }

    /// CSV with one line per window point.
    pub fn to_csv(&self) -> String {
        let (a, b) = match self.kind {
            TableKind::Toda => ("x", "t"),
            TableKind::Bdhe => ("m", "n"),
        };
        let mut out = format!("{a},{b},u_re,u_im,v_re,v_im,psi_mantissa_re,psi_mantissa_im,psi_logscale\n");
        for j in 0..self.rows() {
            for i in 0..self.cols() {
                let e = self.at(i, j);
                let u = e.u.to_complex();
                let v = e.v.to_complex();
                let m = e.psi.mantissa();
                let _ = writeln!(
                    out,
                    "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                    self.first.0 + i as i64,
                    self.second[j],
                    u.re,
                    u.im,
                    v.re,
                    v.im,
                    m.re,
                    m.im,
                    e.psi.logscale()
                );
            }
        }
        out
    }
}

fn check_inputs(b: &PeriodMatrix, vs: &[&CVector]) -> Result<()> {
    if vs.iter().any(|v| v.len() != b.genus()) {
        return Err(Error::DimensionMismatch(format!("expected vectors of length {}", b.genus())));
    }
    Ok(())
}

fn guarded(b: &PeriodMatrix, w: &CVector) -> Result<ScaledComplex> {
    let e = theta_value(b, w)?;
    if e.normalized_abs() < DIVISOR_HIT {
        return Err(Error::DivisorHit(format!("normalized |theta| = {:e}", e.normalized_abs())));
    }
    Ok(e.value)
}

fn guarded_with_derivative(b: &PeriodMatrix, w: &CVector, dir: &CVector) -> Result<(ScaledComplex, ScaledComplex)> {
    guarded(b, w)?;
    theta_with_derivative(b, w, &ThetaCharacteristic::zero(b.genus()), dir)
}

fn point(u: &CVector, v: &CVector, z: &CVector, x: f64, t: f64) -> CVector {
    u * Complex64::new(x, 0.0) + v * Complex64::new(t, 0.0) + z
}

/// `v = -d_V ln theta(xU + tV + Z)`, `u = v(x+1) - v(x)`,
/// `psi = theta(A + xU + tV + Z)/theta(xU + tV + Z) e^{xp + tE}` and its `t` derivative.
pub fn toda_fields(
    u: &CVector,
    v: &CVector,
    a: &CVector,
    exp_p: ScaledComplex,
    e: Complex64,
    window: &LatticeWindow,
    b: &PeriodMatrix,
) -> Result<FieldTable> {
    check_inputs(b, &[u, v, a, &window.z])?;
    if window.kind != TableKind::Toda {
        return Err(Error::InvalidInput("toda_fields needs a Toda window".into()));
    }
    if exp_p.is_zero() || !exp_p.logscale().is_finite() {
        return Err(Error::InvalidInput("e^p must be finite and nonzero".into()));
    }
    let p = exp_p.ln();
    let cols = window.cols();
    let mut entries = Vec::with_capacity(cols * window.second.len());
    for &t in &window.second {
        // tau data for x in first.0 ..= first.1 + 1
        let mut vs = Vec::with_capacity(cols + 1);
        for i in 0..=cols {
            let x = (window.first.0 + i as i64) as f64;
            let (th, dth) = guarded_with_derivative(b, &point(u, v, &window.z, x, t), v)?;
            vs.push((th, dth));
        }
        for i in 0..cols {
            let x = (window.first.0 + i as i64) as f64;
            let (th, dth) = vs[i];
            let (th1, dth1) = vs[i + 1];
            let vx = -(dth / th);
            let vx1 = -(dth1 / th1);
            let w = point(u, v, &window.z, x, t);
            let (tha, dtha) = guarded_with_derivative(b, &(a + &w), v)?;
            let phase = ScaledComplex::exp(p * x + e * t);
            let psi = tha / th * phase;
            let log_deriv = (dtha / tha).to_complex() - (dth / th).to_complex() + e;
            entries.push(FieldEntry {
                u: vx1 - vx,
                v: vx,
                psi,
                dpsi: psi.scale(log_deriv),
            });
        }
    }
    Ok(FieldTable {
        kind: TableKind::Toda,
        first: window.first,
        second: window.second.clone(),
        entries,
    })
}

/// `max |d_t psi - psi(x+1) + u psi| / (|psi(x+1)| + |d_t psi| + floor)`.
pub fn toda_psi_residual(table: &FieldTable) -> Result<f64> {
    if table.kind != TableKind::Toda {
        return Err(Error::InvalidInput("not a Toda table".into()));
    }
    let mut worst: f64 = 0.0;
    for j in 0..table.rows() {
        for i in 0..table.cols().saturating_sub(1) {
            let here = table.at(i, j);
            let next = table.at(i + 1, j);
            let lhs = here.dpsi - next.psi + here.u * here.psi;
            worst = worst.max(ratio(lhs, &[next.psi, here.dpsi]));
        }
    }
    Ok(worst)
}

fn ratio(num: ScaledComplex, den: &[ScaledComplex]) -> f64 {
    let mut all = vec![num];
    all.extend_from_slice(den);
    let (m, _) = crate::theta::to_common_scale(&all);
    m[0].norm() / (m[1..].iter().map(|c| c.norm()).sum::<f64>() + REL_FLOOR)
}

fn theta_grid(b: &PeriodMatrix, u: &CVector, v: &CVector, z: &CVector, window: &LatticeWindow) -> Result<Vec<ScaledComplex>> {
    let cols = window.cols() + 1;
    let n0 = window.second[0];
    let mut grid = Vec::with_capacity(cols * (window.second.len() + 1));
    for j in 0..=window.second.len() {
        for i in 0..cols {
            let m = (window.first.0 + i as i64) as f64;
            grid.push(guarded(b, &point(u, v, z, m, n0 + j as f64))?);
        }
    }
    Ok(grid)
}

/// `u(m,n)` as the four-theta ratio and `psi(m,n) = theta(A+w)/theta(w) e^{mp + nE}`,
/// `w = mU + nV + Z`.
pub fn bdhe_fields(
    u: &CVector,
    v: &CVector,
    a: &CVector,
    exp_p: ScaledComplex,
    exp_e: ScaledComplex,
    window: &LatticeWindow,
    b: &PeriodMatrix,
) -> Result<FieldTable> {
    check_inputs(b, &[u, v, a, &window.z])?;
    if window.kind != TableKind::Bdhe {
        return Err(Error::InvalidInput("bdhe_fields needs a BDHE window".into()));
    }
    if b.lattice_distance(&(u - v)) < crate::kummer::DISTINCT_TOL {
        return Err(Error::CoincidentPoints("U = V makes u identically 1".into()));
    }
    if exp_p.is_zero() || exp_e.is_zero() {
        return Err(Error::InvalidInput("e^p and e^E must be nonzero".into()));
    }
    let (p, e) = (exp_p.ln(), exp_e.ln());
    let cols = window.cols();
    let stride = cols + 1;
    let tau = theta_grid(b, u, v, &window.z, window)?;
    let shifted = theta_grid(b, u, v, &(a + &window.z), window)?;
    let mut entries = Vec::with_capacity(cols * window.second.len());
    for j in 0..window.second.len() {
        for i in 0..cols {
            let m = (window.first.0 + i as i64) as f64;
            let n = window.second[j];
            let t = |di: usize, dj: usize| tau[(j + dj) * stride + i + di];
            let uu = t(1, 1) * t(0, 0) / (t(0, 1) * t(1, 0));
            let psi = shifted[j * stride + i] / t(0, 0) * ScaledComplex::exp(p * m + e * n);
            entries.push(FieldEntry {
                u: uu,
                v: ScaledComplex::ZERO,
                psi,
                dpsi: ScaledComplex::ZERO,
            });
        }
    }
    Ok(FieldTable {
        kind: TableKind::Bdhe,
        first: window.first,
        second: window.second.clone(),
        entries,
    })
}

/// `max |psi(m,n+1) - psi(m+1,n) - u psi(m,n)| / (|psi(m,n+1)| + |psi(m+1,n)| + floor)`.
pub fn bdhe_psi_residual(table: &FieldTable) -> Result<f64> {
    if table.kind != TableKind::Bdhe {
        return Err(Error::InvalidInput("not a BDHE table".into()));
    }
    let mut worst: f64 = 0.0;
    for j in 0..table.rows().saturating_sub(1) {
        for i in 0..table.cols().saturating_sub(1) {
            let up = table.at(i, j + 1).psi;
            let right = table.at(i + 1, j).psi;
            let here = table.at(i, j);
            let lhs = up - right - here.u * here.psi;
            worst = worst.max(ratio(lhs, &[up, right]));
        }
    }
    Ok(worst)
}

/// Least-squares solution of `c1 x + c2 y = r` over rows that are each scaled
/// to unit maximum modulus.
fn solve_rows(rows: &[[ScaledComplex; 3]]) -> Result<(Complex64, Complex64)> {
    let mut m = DMatrix::zeros(rows.len(), 2);
    let mut r = DVector::zeros(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let (vals, _) = crate::theta::to_common_scale(row);
        m[(k, 0)] = vals[0];
        m[(k, 1)] = vals[1];
        r[k] = vals[2];
    }
    let svd = m.svd(true, true);
    let x = svd
        .solve(&r, 1e-14)
        .map_err(|e| Error::InvalidInput(format!("least squares: {e}")))?;
    Ok((x[0], x[1]))
}

/// The `(e^p, e^E)` making `psi = theta(A+w)/theta(w) e^{mp+nE}` solve the
/// discrete linear problem best over the window: for `phi = theta(A+w)/theta(w)`,
/// `e^E phi(m,n+1) - e^p phi(m+1,n) = u(m,n) phi(m,n)` is linear in the unknowns.
pub fn bdhe_window_constants(
    u: &CVector,
    v: &CVector,
    a: &CVector,
    window: &LatticeWindow,
    b: &PeriodMatrix,
) -> Result<(Complex64, Complex64)> {
    let one = ScaledComplex::ONE;
    let table = bdhe_fields(u, v, a, one, one, window, b)?;
    let mut rows = Vec::new();
    for j in 0..table.rows().saturating_sub(1) {
        for i in 0..table.cols().saturating_sub(1) {
            let here = table.at(i, j);
            rows.push([-table.at(i + 1, j).psi, table.at(i, j + 1).psi, here.u * here.psi]);
        }
    }
    solve_rows(&rows)
}

/// The `(e^p, E)` best solving the Toda linear problem over the window:
/// `e^p phi(x+1) - E phi(x) = phi(x) (d_t ln phi + u)` with `phi` the theta ratio.
pub fn toda_window_constants(
    u: &CVector,
    v: &CVector,
    a: &CVector,
    window: &LatticeWindow,
    b: &PeriodMatrix,
) -> Result<(Complex64, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    let table = toda_fields(u, v, a, ScaledComplex::ONE, zero, window, b)?;
    let mut rows = Vec::new();
    for j in 0..table.rows() {
        for i in 0..table.cols().saturating_sub(1) {
            let here = table.at(i, j);
            // with p = E = 0 the stored psi is phi and dpsi is phi d_t ln phi
            rows.push([table.at(i + 1, j).psi, -here.psi, here.dpsi + here.u * here.psi]);
        }
    }
    solve_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exact_toda_eigenfunction() {
        let k: f64 = 2.0;
        let win = LatticeWindow::toda((0, 7), (0..8).map(|j| j as f64 * 0.1).collect(), CVector::zeros(1)).unwrap();
        let table = FieldTable::from_fn(&win, |x, t| {
            let psi = ScaledComplex::exp(c(x as f64 * k.ln() + k * t, 0.0));
            FieldEntry {
                u: ScaledComplex::ZERO,
                v: ScaledComplex::ZERO,
                psi,
                dpsi: psi.scale(c(k, 0.0)),
            }
        });
        assert!(toda_psi_residual(&table).unwrap() <= 1e-14);
    }

    #[test]
    fn constant_coefficient_hirota() {
        let win = LatticeWindow::bdhe((0, 5), (0, 5), CVector::zeros(1)).unwrap();
        let table = FieldTable::from_fn(&win, |_, n| FieldEntry {
            u: ScaledComplex::ONE,
            v: ScaledComplex::ZERO,
            psi: ScaledComplex::from(c(2f64.powf(n), 0.0)),
            dpsi: ScaledComplex::ZERO,
        });
        let r = bdhe_psi_residual(&table).unwrap();
        assert!(r <= 1e-15, "{r}");
    }

    #[test]
    fn static_toda_data_has_no_potential() {
        let b = PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        let u = CVector::from_element(1, c(0.21, 0.1));
        let a = CVector::from_element(1, c(0.3, 0.2));
        let win = LatticeWindow::toda((0, 3), vec![0.0, 0.5], CVector::from_element(1, c(0.1, 0.05))).unwrap();
        let t = toda_fields(&u, &CVector::zeros(1), &a, ScaledComplex::ONE, c(1.0, 0.0), &win, &b).unwrap();
        for j in 0..t.rows() {
            for i in 0..t.cols() {
                assert!(t.at(i, j).u.is_zero());
                assert!(t.at(i, j).v.is_zero());
            }
        }
    }

    #[test]
    fn integer_shift_of_base_point_leaves_u_unchanged() {
        let mut r = rng::seeded(2);
        let b = rng::period_matrix(&mut r, 2).unwrap();
        let (u, v, a) = (
            rng::complex_vector(&mut r, 2, 0.3),
            rng::complex_vector(&mut r, 2, 0.3),
            rng::complex_vector(&mut r, 2, 0.3),
        );
        let z = rng::complex_vector(&mut r, 2, 0.3);
        let win = LatticeWindow::bdhe((0, 3), (0, 3), z).unwrap();
        let one = ScaledComplex::ONE;
        let t0 = bdhe_fields(&u, &v, &a, one, one, &win, &b).unwrap();
        let e1 = CVector::from_column_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let t1 = bdhe_fields(&u, &v, &a, one, one, &win.shifted(&e1, 0), &b).unwrap();
        for j in 0..4 {
            for i in 0..4 {
                let (x, y) = (t0.at(i, j).u.to_complex(), t1.at(i, j).u.to_complex());
                assert!((x - y).norm() <= 1e-12 * x.norm());
            }
        }
        // moving Z by U and the window by -1 reproduces the table
        let t2 = bdhe_fields(&u, &v, &a, one, one, &win.shifted(&u, -1), &b).unwrap();
        for j in 0..4 {
            for i in 0..4 {
                let (x, y) = (t0.at(i, j).u.to_complex(), t2.at(i, j).u.to_complex());
                assert!((x - y).norm() <= 1e-12 * x.norm());
            }
        }
    }

    #[test]
    fn csv_has_one_line_per_point() {
        let win = LatticeWindow::bdhe((0, 2), (0, 1), CVector::zeros(1)).unwrap();
        let table = FieldTable::from_fn(&win, |_, _| FieldEntry {
            u: ScaledComplex::ONE,
            v: ScaledComplex::ZERO,
            psi: ScaledComplex::ONE,
            dpsi: ScaledComplex::ZERO,
        });
        let csv = table.to_csv();
        assert_eq!(csv.lines().count(), 1 + 6);
        assert!(csv.starts_with("m,n,"));
    }
}
