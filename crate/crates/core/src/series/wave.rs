//! Wave-series recursions and the identities at zeros of the discrete tau.
//!
//! Fully discrete: `xi_{s+1}(x-1, nu) - xi_{s+1}(x+1, nu) = u(x, nu) xi_s(x, nu-1)`
//! with `u = tau(x, nu+1) tau(x, nu-1) / (tau(x-1, nu) tau(x+1, nu))`, solved
//! on an orbit `x0 + k`, `|k| <= K`.
//!
//! Semi-discrete: `xi_{s+1}(x+1, t) - xi_{s+1}(x, t) = d_t xi_s + u xi_s` on
//! `Z/N` times a short `t` grid. Solvability on the cycle needs the `x`-sum of
//! the right side to vanish; it is restored by adding to `xi_s` the function
//! `c_s(t)` with `N c_s' = -sum_x (d_t xi_s + u xi_s)`, which changes the
//! sum by `N c_s'` since `sum_x u = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{stencil, TauFunction, ZERO_TOL};
use crate::error::{Error, Result};
use crate::theta::{ScaledComplex, REL_FLOOR};

/// Normalized `|tau|` below which any of the six factors of the shift ratio is refused.
pub const FACTOR_TOL: f64 = 1e-10;
/// Largest orbit half-width.
pub const MAX_HALF_WIDTH: usize = 32;
/// Normalized `|tau|` flagging an orbit point next to a zero.
pub const NEAR_ZERO: f64 = 1e-8;
/// Largest tolerated `max_x |u(x + N) - u(x)|`.
pub const PERIODICITY_TOL: f64 = 1e-10;
pub const DEFAULT_S_MAX: usize = 3;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn checked_factor(tau: &impl TauFunction, x: Complex64, nu: f64) -> Result<ScaledComplex> {
    let e = tau.value(x, nu)?;
    if e.normalized_abs() <= FACTOR_TOL {
        return Err(Error::GuardFailed(format!("tau({x}, {nu}) vanishes")));
    }
    Ok(e.value)
}

fn require_zero(tau: &impl TauFunction, eta: Complex64, nu: f64) -> Result<super::TauJet> {
    let j = tau.jet(eta, nu)?;
    if j.zero_defect() > ZERO_TOL {
        return Err(Error::GuardFailed(format!(
            "{eta} is not a zero of tau(., {nu}) (relative |tau| = {:e})",
            j.zero_defect()
        )));
    }
    Ok(j)
}

/// `|R + 1|` for
/// `R = tau(eta+1, nu+1) tau(eta-2, nu) tau(eta+1, nu-1) / (tau(eta-1, nu+1) tau(eta+2, nu) tau(eta-1, nu-1))`
/// at a zero `eta` of `tau(., nu)`.
pub fn f2d_residual(tau: &impl TauFunction, eta: Complex64, nu: f64) -> Result<f64> {
    require_zero(tau, eta, nu)?;
    let f = |dx: f64, dnu: f64| checked_factor(tau, eta + dx, nu + dnu);
    let num = f(1.0, 1.0)? * f(-2.0, 0.0)? * f(1.0, -1.0)?;
    let den = f(-1.0, 1.0)? * f(2.0, 0.0)? * f(-1.0, -1.0)?;
    Ok(((num / den).to_complex() + 1.0).norm())
}

/// `xi_s(., nu)` on the orbit, indexed by `k + K`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesLevel {
    pub s: usize,
    pub nu: i64,
    pub values: Vec<Complex64>,
    /// `xi_s` at `k = -K` and `k = -K + 1`.
    pub seeds: [Complex64; 2],
}

/// Orbit point where `u` has a (near) pole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearZero {
    pub s: usize,
    pub nu: i64,
    pub k: i64,
}

/// Discrete wave coefficients on the orbit `x0 + k`, `|k| <= half_width`.
/// `xi_0 = 1` is implicit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesTable {
    pub s_max: usize,
    pub x0: Complex64,
    pub half_width: usize,
    pub levels: Vec<SeriesLevel>,
    pub near_zeros: Vec<NearZero>,
}

impl SeriesTable {
    pub fn new(x0: Complex64, half_width: usize, s_max: usize) -> Result<Self> {
        if half_width == 0 || half_width > MAX_HALF_WIDTH {
            return Err(Error::WindowExhausted(format!("half-width must lie in 1..={MAX_HALF_WIDTH}")));
        }
        Ok(SeriesTable {
            s_max,
            x0,
            half_width,
            levels: Vec::new(),
            near_zeros: Vec::new(),
        })
    }

    pub fn points(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn coordinate(&self, idx: usize) -> Complex64 {
        self.x0 + (idx as f64 - self.half_width as f64)
    }

    /// `xi_s(., nu)` if known.
    pub fn values(&self, s: usize, nu: i64) -> Option<Vec<Complex64>> {
        if s == 0 {
            return Some(vec![Complex64::new(1.0, 0.0); self.points()]);
        }
        self.levels.iter().find(|l| l.s == s && l.nu == nu).map(|l| l.values.clone())
    }

    fn insert(&mut self, level: SeriesLevel) {
        self.levels.retain(|l| !(l.s == level.s && l.nu == level.nu));
        self.levels.push(level);
    }
}

/// `u(x0 + k, nu)` for `|k| < K`, indexed by `k + K` (the two ends are unused).
fn potential(table: &SeriesTable, tau: &impl TauFunction, nu: i64) -> Result<(Vec<Complex64>, Vec<i64>)> {
    let n = table.points();
    let nu_f = nu as f64;
    let here: Vec<_> = (0..n).map(|i| tau.value(table.coordinate(i), nu_f)).collect::<Result<_>>()?;
    let mut u = vec![zero(); n];
    let mut flagged = Vec::new();
    for i in 1..n - 1 {
        let x = table.coordinate(i);
        if here[i - 1].normalized_abs() < NEAR_ZERO || here[i + 1].normalized_abs() < NEAR_ZERO {
            flagged.push(i as i64 - table.half_width as i64);
        }
        let up = tau.value(x, nu_f + 1.0)?.value;
        let down = tau.value(x, nu_f - 1.0)?.value;
        u[i] = (up * down / (here[i - 1].value * here[i + 1].value)).to_complex();
    }
    Ok((u, flagged))
}

/// Builds `xi_{s+1}(., nu)` from `xi_s(., nu - 1)` by the one-sided sweep
/// `xi_{s+1}(x + 1) = xi_{s+1}(x - 1) - u(x, nu) xi_s(x, nu - 1)` from the
/// two seeds at the left end of the orbit.
pub fn discrete_series_extend(
    mut table: SeriesTable,
    tau: &impl TauFunction,
    s: usize,
    nu: i64,
    seeds: [Complex64; 2],
) -> Result<SeriesTable> {
    if s + 1 > table.s_max {
        return Err(Error::WindowExhausted(format!("order {} exceeds s_max = {}", s + 1, table.s_max)));
    }
    let prev = table
        .values(s, nu - 1)
        .ok_or_else(|| Error::WindowExhausted(format!("xi_{s} is not known at nu = {}", nu - 1)))?;
    let (u, flagged) = potential(&table, tau, nu)?;
    let n = table.points();
    let mut next = vec![zero(); n];
    next[0] = seeds[0];
    next[1] = seeds[1];
    for i in 1..n - 1 {
        next[i + 1] = next[i - 1] - u[i] * prev[i];
    }
    for k in flagged {
        let z = NearZero { s: s + 1, nu, k };
        if !table.near_zeros.contains(&z) {
            table.near_zeros.push(z);
        }
    }
    table.insert(SeriesLevel {
        s: s + 1,
        nu,
        values: next,
        seeds,
    });
    Ok(table)
}

/// Largest relative defect of the discrete recursion between `xi_s(., nu-1)`
/// and the stored `xi_{s+1}(., nu)`, skipping flagged points.
pub fn discrete_series_recheck(table: &SeriesTable, tau: &impl TauFunction, s: usize, nu: i64) -> Result<f64> {
    let missing = |s: usize, nu: i64| Error::WindowExhausted(format!("xi_{s} is not known at nu = {nu}"));
    let prev = table.values(s, nu - 1).ok_or_else(|| missing(s, nu - 1))?;
    let next = table.values(s + 1, nu).ok_or_else(|| missing(s + 1, nu))?;
    let (u, flagged) = potential(table, tau, nu)?;
    let mut worst: f64 = 0.0;
    for i in 1..table.points() - 1 {
        if flagged.contains(&(i as i64 - table.half_width as i64)) {
            continue;
        }
        let rhs = u[i] * prev[i];
        let d = next[i - 1] - next[i + 1] - rhs;
        worst = worst.max(d.norm() / (next[i - 1].norm() + next[i + 1].norm() + rhs.norm() + REL_FLOOR));
    }
    Ok(worst)
}

/// The two expressions for the residue `r_{s+1}` of `xi_{s+1}(., nu)` at the
/// zero `eta = x0` of `tau(., nu)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ResidueCheck {
    /// From regularity at `eta + 1`.
    pub forward: Complex64,
    /// From regularity at `eta - 1`; equals `-forward` when consistent.
    pub backward: Complex64,
    /// `|forward + backward| / (|forward| + |backward|)`.
    pub residual: f64,
    /// Relative difference of `xi_s(eta - 1, nu - 1)` and `xi_s(eta + 1, nu - 1)`.
    pub shift_defect: f64,
}

/// Residue consistency at `eta = table.x0`, using `xi_s(eta +- 1, nu - 1)`
/// from the table and `v0 = tau_x(eta, nu)`.
pub fn residue_consistency(table: &SeriesTable, tau: &impl TauFunction, s: usize, nu: i64) -> Result<ResidueCheck> {
    let eta = table.x0;
    let nu_f = nu as f64;
    let v0 = require_zero(tau, eta, nu_f)?.dx;
    let xi = table
        .values(s, nu - 1)
        .ok_or_else(|| Error::WindowExhausted(format!("xi_{s} is not known at nu = {}", nu - 1)))?;
    if table.half_width < 2 {
        return Err(Error::WindowExhausted("residue check needs half-width >= 2".into()));
    }
    let k = table.half_width;
    let (xp, xm) = (xi[k + 1], xi[k - 1]);
    let f = |dx: f64, dnu: f64| checked_factor(tau, eta + dx, nu_f + dnu);
    let forward = (f(1.0, 1.0)? * f(1.0, -1.0)? / (v0 * f(2.0, 0.0)?)).to_complex() * xp;
    let backward = (f(-1.0, 1.0)? * f(-1.0, -1.0)? / (v0 * f(-2.0, 0.0)?)).to_complex() * xm;
    Ok(ResidueCheck {
        forward,
        backward,
        residual: (forward + backward).norm() / (forward.norm() + backward.norm() + REL_FLOOR),
        shift_defect: (xp - xm).norm() / (xp.norm() + xm.norm() + REL_FLOOR),
    })
}

/// `u` and `v = -d_t ln tau` on `Z/N` times a `t` grid, indexed `[j][x]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicFields {
    pub n: usize,
    pub t: Vec<f64>,
    pub u: Vec<Vec<Complex64>>,
    pub v: Vec<Vec<Complex64>>,
}

fn check_grid(n: usize, t: &[f64]) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput("period must be at least 2".into()));
    }
    if t.len() < stencil::WIDTH || t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(format!(
            "t grid needs at least {} increasing points",
            stencil::WIDTH
        )));
    }
    Ok(())
}

impl PeriodicFields {
    /// Fields of `tau`, rejected unless `u` is `N`-periodic in `x`.
    pub fn from_tau(tau: &impl TauFunction, n: usize, t: Vec<f64>) -> Result<Self> {
        check_grid(n, &t)?;
        let mut u = Vec::with_capacity(t.len());
        let mut v = Vec::with_capacity(t.len());
        let mut worst: f64 = 0.0;
        for &tj in &t {
            let vs: Vec<Complex64> = (0..=2 * n)
                .map(|x| Ok(tau.jet(Complex64::new(x as f64, 0.0), tj)?.v()))
                .collect::<Result<_>>()?;
            let us: Vec<Complex64> = vs.windows(2).map(|w| w[1] - w[0]).collect();
            for x in 0..n {
                worst = worst.max((us[x + n] - us[x]).norm());
            }
            u.push(us[..n].to_vec());
            v.push(vs[..n].to_vec());
        }
        if worst > PERIODICITY_TOL {
            return Err(Error::NonPeriodic(worst));
        }
        Ok(PeriodicFields { n, t, u, v })
    }

    pub fn zero(n: usize, t: Vec<f64>) -> Result<Self> {
        check_grid(n, &t)?;
        let rows = vec![vec![zero(); n]; t.len()];
        Ok(PeriodicFields {
            n,
            u: rows.clone(),
            v: rows,
            t,
        })
    }
}

/// Semi-discrete wave coefficients `xi_s[j][x]` and the normalizing
/// functions `c_s[j]` already added to them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicSeriesTable {
    pub s_max: usize,
    pub n: usize,
    pub t: Vec<f64>,
    pub levels: Vec<Vec<Vec<Complex64>>>,
    pub c: Vec<Vec<Complex64>>,
}

impl PeriodicSeriesTable {
    /// Table holding `xi_0 = 1`.
    pub fn new(n: usize, t: Vec<f64>, s_max: usize) -> Result<Self> {
        check_grid(n, &t)?;
        let one = vec![vec![Complex64::new(1.0, 0.0); n]; t.len()];
        Ok(PeriodicSeriesTable {
            s_max,
            n,
            c: vec![vec![zero(); t.len()]],
            t,
            levels: vec![one],
        })
    }

    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }
}

fn time_derivative(t: &[f64], f: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    stencil::derivative_weights(t)
        .into_iter()
        .map(|(s, w)| {
            let mut row = vec![zero(); f[0].len()];
            for (i, wi) in w.iter().enumerate() {
                for (r, v) in row.iter_mut().zip(&f[s + i]) {
                    *r += v * wi;
                }
            }
            row
        })
        .collect()
}

/// `d_t xi + u xi`, indexed `[j][x]`.
fn right_side(t: &[f64], xi: &[Vec<Complex64>], fields: &PeriodicFields) -> Vec<Vec<Complex64>> {
    let mut rhs = time_derivative(t, xi);
    for (j, row) in rhs.iter_mut().enumerate() {
        for (x, r) in row.iter_mut().enumerate() {
            *r += fields.u[j][x] * xi[j][x];
        }
    }
    rhs
}

fn check_fields(table: &PeriodicSeriesTable, fields: &PeriodicFields) -> Result<()> {
    if fields.n != table.n || fields.t != table.t {
        return Err(Error::DimensionMismatch("fields and table use different grids".into()));
    }
    Ok(())
}

/// Adds `xi_{s+1}` for `s` the current top order. With `cancel_mean` the
/// rhs mean is first removed by adding `c_s` to `xi_s`; without it the sweep
/// runs on the raw rhs and the cycle generally fails to close.
pub fn semidiscrete_series_extend(
    mut table: PeriodicSeriesTable,
    fields: &PeriodicFields,
    s: usize,
    cancel_mean: bool,
) -> Result<PeriodicSeriesTable> {
    check_fields(&table, fields)?;
    if s != table.order() {
        return Err(Error::InvalidInput(format!("can only extend the top order {}", table.order())));
    }
    if s + 1 > table.s_max {
        return Err(Error::WindowExhausted(format!("order {} exceeds s_max = {}", s + 1, table.s_max)));
    }
    let (n, t) = (table.n, table.t.clone());
    let mut rhs = right_side(&t, &table.levels[s], fields);
    if cancel_mean {
        let cdot: Vec<Complex64> = rhs.iter().map(|row| -row.iter().sum::<Complex64>() / n as f64).collect();
        let mut c = vec![zero(); t.len()];
        for (j, (st, w)) in stencil::interval_weights(&t).into_iter().enumerate() {
            let step: Complex64 = w.iter().enumerate().map(|(i, wi)| cdot[st + i] * wi).sum();
            c[j + 1] = c[j] + step;
        }
        for (row, cj) in table.levels[s].iter_mut().zip(&c) {
            row.iter_mut().for_each(|x| *x += cj);
        }
        for (acc, cj) in table.c[s].iter_mut().zip(&c) {
            *acc += cj;
        }
        rhs = right_side(&t, &table.levels[s], fields);
    }
    let next: Vec<Vec<Complex64>> = rhs
        .iter()
        .map(|row| {
            let mut out = vec![zero(); n];
            for x in 0..n - 1 {
                out[x + 1] = out[x] + row[x];
            }
            out
        })
        .collect();
    table.levels.push(next);
    table.c.push(vec![zero(); t.len()]);
    Ok(table)
}

/// Largest pointwise relative defect of
/// `xi_{s+1}(x+1) - xi_{s+1}(x) = d_t xi_s + u xi_s` on the cycle, with the
/// time derivative recomputed from the stored `xi_s`.
pub fn semidiscrete_residual(table: &PeriodicSeriesTable, fields: &PeriodicFields, s: usize) -> Result<f64> {
    check_fields(table, fields)?;
    if s + 1 > table.order() {
        return Err(Error::InvalidInput(format!("order {} not built", s + 1)));
    }
    let n = table.n;
    let rhs = right_side(&table.t, &table.levels[s], fields);
    let next = &table.levels[s + 1];
    let mut worst: f64 = 0.0;
    for (j, row) in rhs.iter().enumerate() {
        for x in 0..n {
            let (a, b) = (next[j][(x + 1) % n], next[j][x]);
            let d = a - b - row[x];
            worst = worst.max(d.norm() / (a.norm() + b.norm() + row[x].norm() + REL_FLOOR));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::{find_zero, Shifted, ThetaTau};
    use super::*;
    use crate::roots::Rect;
    use crate::theta::PeriodMatrix;
    use crate::{rng, CVector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn vec1(z: Complex64) -> CVector {
        CVector::from_element(1, z)
    }

    fn torus() -> PeriodMatrix {
        PeriodMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap()
    }

    fn discrete_tau(seed: u64) -> ThetaTau {
        let b = torus();
        let mut r = rng::seeded(seed);
        let u = rng::cell_vector(&mut r, &b);
        let v = rng::cell_vector(&mut r, &b);
        let z = rng::cell_vector(&mut r, &b);
        ThetaTau::discrete(&u, &v, &z, b).unwrap()
    }

    /// Zero of `tau(., nu)` in a square holding a whole period cell in `x`.
    fn zero_of<T: TauFunction>(tau: &T, step: &ThetaTau, nu: f64) -> Complex64 {
        let half = 1.0 / step.u()[0].norm();
        find_zero(tau, nu, &Rect::new(c(-half, -half), c(half, half))).unwrap()
    }

    #[test]
    fn genus_one_shift_ratio_is_minus_one() {
        for seed in 0..5 {
            let tau = discrete_tau(seed);
            let eta = zero_of(&tau, &tau, 0.0);
            assert!(f2d_residual(&tau, eta, 0.0).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn shifted_tau_breaks_shift_ratio() {
        let mut worst: f64 = 0.0;
        for seed in 0..5 {
            let inner = discrete_tau(seed);
            let tau = Shifted {
                inner: inner.clone(),
                shift: c(0.05, 0.0),
            };
            let eta = zero_of(&tau, &inner, 0.0);
            worst = worst.max(f2d_residual(&tau, eta, 0.0).unwrap());
        }
        assert!(worst >= 1e-2, "{worst}");
    }

    #[test]
    fn shift_ratio_refuses_non_zeros() {
        let tau = discrete_tau(2);
        assert!(matches!(f2d_residual(&tau, c(0.123, 0.0), 0.0), Err(Error::GuardFailed(_))));
    }

    struct Constant;

    impl TauFunction for Constant {
        fn jet(&self, _: Complex64, _: f64) -> Result<super::super::TauJet> {
            let one = ScaledComplex::ONE;
            Ok(super::super::TauJet {
                value: one,
                dx: ScaledComplex::ZERO,
                dt: ScaledComplex::ZERO,
                dxx: ScaledComplex::ZERO,
                dxt: ScaledComplex::ZERO,
                dtt: ScaledComplex::ZERO,
                envelope: 0.0,
            })
        }
    }

    #[test]
    fn unit_potential_with_equal_seeds_telescopes() {
        // u = 1 here, so the sweep advances by -1 every two sites
        let table = SeriesTable::new(c(0.0, 0.0), 4, 3).unwrap();
        let table = discrete_series_extend(table, &Constant, 0, 0, [c(2.0, 0.0); 2]).unwrap();
        let xi = table.values(1, 0).unwrap();
        for i in 2..xi.len() {
            assert_eq!(xi[i], xi[i - 2] - 1.0);
        }
        assert_eq!(discrete_series_recheck(&table, &Constant, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn window_limits() {
        assert!(matches!(SeriesTable::new(c(0.0, 0.0), 33, 3), Err(Error::WindowExhausted(_))));
        let table = SeriesTable::new(c(0.0, 0.0), 4, 1).unwrap();
        let table = discrete_series_extend(table, &Constant, 0, 0, [zero(); 2]).unwrap();
        assert!(matches!(
            discrete_series_extend(table.clone(), &Constant, 1, 1, [zero(); 2]),
            Err(Error::WindowExhausted(_))
        ));
        let table = SeriesTable { s_max: 3, ..table };
        assert!(matches!(
            discrete_series_extend(table, &Constant, 1, 5, [zero(); 2]),
            Err(Error::WindowExhausted(_))
        ));
    }

    #[test]
    fn residues_agree_at_genus_one_zeros() {
        for seed in 0..4 {
            let tau = discrete_tau(seed);
            let eta = zero_of(&tau, &tau, 0.0);
            let mut table = SeriesTable::new(eta, 8, 3).unwrap();
            table = discrete_series_extend(table, &tau, 0, -2, [c(0.3, 0.1), c(-0.2, 0.4)]).unwrap();
            table = discrete_series_extend(table, &tau, 0, -1, [c(0.3, 0.1), c(-0.2, 0.4)]).unwrap();
            table = discrete_series_extend(table, &tau, 1, -1, [c(0.1, 0.0), c(0.0, 0.1)]).unwrap();
            table = discrete_series_extend(table, &tau, 1, 0, [c(0.1, 0.0), c(0.0, 0.1)]).unwrap();
            assert!(discrete_series_recheck(&table, &tau, 0, -1).unwrap() <= 1e-12);
            assert!(discrete_series_recheck(&table, &tau, 1, 0).unwrap() <= 1e-12);
            for s in 0..2 {
                let r = residue_consistency(&table, &tau, s, 0).unwrap();
                assert!(r.residual <= 1e-8, "seed {seed} s {s}: {}", r.residual);
                assert!(r.shift_defect <= 1e-12);
            }
        }
    }

    #[test]
    fn shifted_tau_breaks_residue_consistency() {
        let mut worst = [0.0f64; 2];
        for seed in 0..5 {
            let inner = discrete_tau(seed);
            let tau = Shifted {
                inner: inner.clone(),
                shift: c(0.05, 0.0),
            };
            let eta = zero_of(&tau, &inner, 0.0);
            let mut table = SeriesTable::new(eta, 8, 3).unwrap();
            table = discrete_series_extend(table, &tau, 0, -1, [c(0.3, 0.1), c(-0.2, 0.4)]).unwrap();
            for (s, w) in worst.iter_mut().enumerate() {
                *w = w.max(residue_consistency(&table, &tau, s, 0).unwrap().residual);
            }
        }
        assert!(worst.iter().all(|&w| w >= 1e-2), "{worst:?}");
    }

    fn stencil_grid() -> Vec<f64> {
        (0..5).map(|j| 0.3 + 0.005 * j as f64).collect()
    }

    #[test]
    fn zero_fields_give_constant_levels() {
        let fields = PeriodicFields::zero(5, stencil_grid()).unwrap();
        let table = PeriodicSeriesTable::new(5, stencil_grid(), 3).unwrap();
        let table = semidiscrete_series_extend(table, &fields, 0, true).unwrap();
        for row in &table.levels[1] {
            assert!(row.iter().all(|x| (x - row[0]).norm() < 1e-12));
        }
    }

    fn periodic_tau(seed: u64, n: usize) -> ThetaTau {
        let mut r = rng::seeded(seed);
        let v = vec1(rng::complex_in_box(&mut r, 0.5));
        let z = vec1(rng::complex_in_box(&mut r, 0.5));
        ThetaTau::new(vec1(c(1.0 / n as f64, 0.0)), v, z, torus()).unwrap()
    }

    #[test]
    fn normalized_levels_close_on_the_cycle() {
        for seed in 0..3 {
            let tau = periodic_tau(seed, 5);
            let fields = PeriodicFields::from_tau(&tau, 5, stencil_grid()).unwrap();
            let mut table = PeriodicSeriesTable::new(5, stencil_grid(), 3).unwrap();
            for s in 0..2 {
                table = semidiscrete_series_extend(table, &fields, s, true).unwrap();
            }
            for s in 0..2 {
                let r = semidiscrete_residual(&table, &fields, s).unwrap();
                assert!(r <= 1e-6, "seed {seed} s {s}: {r}");
            }
            let raw = semidiscrete_series_extend(
                PeriodicSeriesTable::new(5, stencil_grid(), 3)
                    .and_then(|t| semidiscrete_series_extend(t, &fields, 0, true))
                    .unwrap(),
                &fields,
                1,
                false,
            )
            .unwrap();
            assert!(semidiscrete_residual(&raw, &fields, 1).unwrap() >= 1e-3);
        }
    }

    #[test]
    fn non_periodic_fields_are_rejected() {
        let mut r = rng::seeded(4);
        let tau = ThetaTau::new(
            vec1(c(0.23, 0.0)),
            vec1(rng::complex_in_box(&mut r, 0.5)),
            vec1(c(0.1, 0.1)),
            torus(),
        )
        .unwrap();
        assert!(matches!(PeriodicFields::from_tau(&tau, 5, stencil_grid()), Err(Error::NonPeriodic(_))));
    }
}
