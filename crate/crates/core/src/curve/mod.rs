//! Jacobian data of genus-1 tori and genus-2 hyperelliptic curves.
//!
//! Genus 2 uses the model `y^2 = p(x)` with `p` monic of degree 5. Branch points
//! `e1..e5` are sorted by `(Re, Im)`. The straight segments `[e_k, e_{k+1}]`
//! lift to a chain of cycles `c_1..c_4` with consecutive intersections `+-1`;
//! the symplectic basis is
//!
//! ```text
//! a1 = c1, a2 = c3, b1 = c2 + c4, b2 = c4
//! ```
//!
//! Each `c_k` is only known up to orientation, so all sign patterns are tried
//! and the first one satisfying the Riemann bilinear relations (symmetric `B`,
//! positive definite `Im B`) is kept.

pub mod corpus;
pub mod poly;
pub mod quadrature;

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::PeriodMatrix;
use crate::CVector;

/// Minimum separation of branch points.
pub const BRANCH_SEPARATION: f64 = 1e-8;
/// `|p(x)|` below which a point counts as a branch point.
pub const BRANCH_POINT_TOL: f64 = 1e-10;
/// Clearance a path segment keeps from branch points that are not its endpoints.
pub const PATH_CLEARANCE: f64 = 1e-3;
/// Pairwise lattice distance below which curve points count as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-8;

const DETOUR_OFFSETS: [f64; 8] = [0.3, -0.3, 0.6, -0.6, 0.9, -0.9, 1.2, -1.2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CurveSpec {
    Genus1 { tau: Complex64 },
    /// Ascending coefficients of a monic quintic.
    Hyperelliptic2 { poly: Vec<Complex64> },
}

impl CurveSpec {
    pub fn genus(&self) -> usize {
        match self {
            CurveSpec::Genus1 { .. } => 1,
            CurveSpec::Hyperelliptic2 { .. } => 2,
        }
    }

    /// `y^2 = x^5 - 1`.
    pub fn x5_minus_1() -> Self {
        let mut poly = vec![Complex64::new(0.0, 0.0); 6];
        poly[0] = Complex64::new(-1.0, 0.0);
        poly[5] = Complex64::new(1.0, 0.0);
        CurveSpec::Hyperelliptic2 { poly }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CurvePoint {
    /// Point of `C / (Z + tau Z)` in the flat coordinate.
    Torus(Complex64),
    /// `(x, y)` with `y = sheet * sqrt(p(x))`, principal square root.
    Affine { x: Complex64, sheet: Sheet },
}

impl CurvePoint {
    pub fn affine(x: Complex64, sheet: Sheet) -> Self {
        CurvePoint::Affine { x, sheet }
    }

    /// `y` on the hyperelliptic model; `None` for torus points.
    pub fn y(&self, poly: &[Complex64]) -> Option<Complex64> {
        match *self {
            CurvePoint::Torus(_) => None,
            CurvePoint::Affine { x, sheet } => Some(poly::eval(poly, x).sqrt() * sheet.sign()),
        }
    }
}

/// Period data and Abel-map evaluator of a curve. Immutable once built.
#[derive(Clone, Debug)]
pub struct AbelData {
    curve: CurveSpec,
    b: PeriodMatrix,
    a_periods: DMatrix<Complex64>,
    b_periods: DMatrix<Complex64>,
    normalization: DMatrix<Complex64>,
    branch_points: Vec<Complex64>,
}

impl AbelData {
    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }

    pub fn period_matrix(&self) -> &PeriodMatrix {
        &self.b
    }

    pub fn a_periods(&self) -> &DMatrix<Complex64> {
        &self.a_periods
    }

    pub fn b_periods(&self) -> &DMatrix<Complex64> {
        &self.b_periods
    }

    /// Inverse of the a-period matrix.
    pub fn normalization(&self) -> &DMatrix<Complex64> {
        &self.normalization
    }

    /// Sorted branch points (empty for genus 1).
    pub fn branch_points(&self) -> &[Complex64] {
        &self.branch_points
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    /// Origin of the Abel map: `z = 0` on a torus, `e1` on the hyperelliptic model.
    pub fn basepoint(&self) -> CurvePoint {
        match self.curve {
            CurveSpec::Genus1 { .. } => CurvePoint::Torus(Complex64::new(0.0, 0.0)),
            CurveSpec::Hyperelliptic2 { .. } => CurvePoint::affine(self.branch_points[0], Sheet::Plus),
        }
    }

    fn poly(&self) -> &[Complex64] {
        match &self.curve {
            CurveSpec::Hyperelliptic2 { poly } => poly,
            CurveSpec::Genus1 { .. } => &[],
        }
    }
}

fn lexicographic(a: &Complex64, b: &Complex64) -> Ordering {
    if (a.re - b.re).abs() > 1e-9 {
        a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal)
    } else {
        a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)
    }
}

fn sorted_branch_points(poly: &[Complex64]) -> Result<Vec<Complex64>> {
    if poly.len() != 6 {
        return Err(Error::InvalidInput(format!(
            "hyperelliptic model needs 6 coefficients, got {}",
            poly.len()
        )));
    }
    if poly.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
    }
    if (poly[5] - 1.0).norm() > 1e-14 {
        return Err(Error::InvalidInput("polynomial must be monic".into()));
    }
    let mut roots = poly::roots(poly);
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (p, d) = poly::eval_with_derivative(poly, *r);
            if d.norm() > 0.0 {
                *r -= p / d;
            }
        }
    }
    let scale: f64 = poly.iter().map(|c| c.norm()).sum();
    for (i, r) in roots.iter().enumerate() {
        for s in &roots[..i] {
            if (r - s).norm() <= BRANCH_SEPARATION {
                return Err(Error::DegenerateCurve(format!("branch points {r} and {s} coincide")));
            }
        }
        // a multiple root leaves a cluster where p' also vanishes
        let (_, d) = poly::eval_with_derivative(poly, *r);
        let dscale: f64 = (1..6).map(|k| k as f64 * poly[k].norm() * r.norm().powi(k as i32 - 1)).sum();
        if d.norm() <= 1e-6 * dscale.max(scale) {
            return Err(Error::DegenerateCurve(format!("repeated root near {r}")));
        }
    }
    roots.sort_by(lexicographic);
    Ok(roots)
}

/// `prod_{r != skip} sqrt((x - r)/(k - r))`: continuous in `x` along any
/// segment ending at `k` that avoids the roots.
fn ratio_product(roots: &[Complex64], skip: Option<usize>, x: Complex64, k: Complex64) -> Complex64 {
    roots
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(_, r)| ((x - r) / (k - r)).sqrt())
        .product()
}

/// `(int dx/y, int x dx/y)` over `[e_k, e_{k+1}]` on one branch.
fn chain_integral(roots: &[Complex64], k: usize) -> Result<[Complex64; 2]> {
    let (a, b) = (roots[k], roots[k + 1]);
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let others: Vec<Complex64> = roots
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k && *i != k + 1)
        .map(|(_, r)| *r)
        .collect();
    let q_mid: Complex64 = others.iter().map(|r| mid - r).product::<Complex64>().sqrt();
    let i = Complex64::new(0.0, 1.0);
    // x = mid - half cos(theta) turns dx/y into dtheta / (i Q(x))
    quadrature::integrate(|t| {
        let x = mid - half * (PI * t).cos();
        let q = q_mid * ratio_product(&others, None, x, mid);
        let w = PI / (i * q);
        [w, w * x]
    })
}

fn period_data(roots: &[Complex64]) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>, PeriodMatrix)> {
    let chain: Vec<[Complex64; 2]> = (0..4).map(|k| chain_integral(roots, k)).collect::<Result<_>>()?;
    let mut last_err = None;
    for code in 0..8u32 {
        let s = [1.0, sign(code, 0), sign(code, 1), sign(code, 2)];
        let c = |k: usize, comp: usize| chain[k][comp] * (2.0 * s[k]);
        let a = DMatrix::from_fn(2, 2, |i, j| if j == 0 { c(0, i) } else { c(2, i) });
        let bp = DMatrix::from_fn(2, 2, |i, j| if j == 0 { c(1, i) + c(3, i) } else { c(3, i) });
        let Some(n) = a.clone().try_inverse() else {
            return Err(Error::DegenerateCurve("a-period matrix is singular".into()));
        };
        let b = &n * &bp;
        let max_abs = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let asym = (b[(0, 1)] - b[(1, 0)]).norm();
        if asym > 1e-8 * max_abs {
            last_err = Some(Error::NonPosDef(format!("computed B not symmetric ({asym:e})")));
            continue;
        }
        match PeriodMatrix::new_symmetrized(b) {
            Ok(pm) => return Ok((a, bp, pm)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::NonPosDef("no admissible homology orientation".into())))
}

fn sign(code: u32, bit: u32) -> f64 {
    if (code >> bit) & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Periods, normalized period matrix and Abel-map data of a curve.
pub fn build_abel_data(curve: &CurveSpec) -> Result<AbelData> {
    match curve {
        CurveSpec::Genus1 { tau } => {
            let b = PeriodMatrix::from_rows(1, &[*tau])?;
            let one = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
            Ok(AbelData {
                curve: curve.clone(),
                b,
                a_periods: one.clone(),
                b_periods: DMatrix::from_element(1, 1, *tau),
                normalization: one,
                branch_points: Vec::new(),
            })
        }
        CurveSpec::Hyperelliptic2 { poly } => {
            let roots = sorted_branch_points(poly)?;
            let (a, bp, b) = period_data(&roots)?;
            let normalization = a
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::DegenerateCurve("a-period matrix is singular".into()))?;
            Ok(AbelData {
                curve: curve.clone(),
                b,
                a_periods: a,
                b_periods: bp,
                normalization,
                branch_points: roots,
            })
        }
    }
}

fn segment_distance(r: Complex64, s: Complex64, t: Complex64) -> f64 {
    let d = t - s;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (r - s).norm();
    }
    let u = ((r - s) * d.conj()).re / len2;
    (r - (s + d * u.clamp(0.0, 1.0))).norm()
}

/// Index of the branch point at `x`, if any.
fn branch_index(roots: &[Complex64], poly: &[Complex64], x: Complex64) -> Option<usize> {
    if poly::eval(poly, x).norm() >= BRANCH_POINT_TOL {
        return None;
    }
    roots
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).norm().total_cmp(&(b.1 - x).norm()))
        .map(|(i, _)| i)
}

/// `int_O^K (1, x) dx / y` along the straight segment, `y(K) = y_k` known.
/// If `O` is the branch point `roots[o_branch]` the substitution
/// `x = O + (K - O) s^2` removes the square-root singularity.
fn segment_integral(
    roots: &[Complex64],
    o: Complex64,
    o_branch: Option<usize>,
    k: Complex64,
    y_k: Complex64,
) -> Result<[Complex64; 2]> {
    match o_branch {
        None => quadrature::integrate(|t| {
            let x = o + (k - o) * t;
            let y = y_k * ratio_product(roots, None, x, k);
            let w = (k - o) / y;
            [w, w * x]
        }),
        Some(idx) => {
            let e = roots[idx];
            quadrature::integrate(|s| {
                let x = e + (k - e) * (s * s);
                let w = (k - e) * 2.0 / (y_k * ratio_product(roots, Some(idx), x, k));
                [w, w * x]
            })
        }
    }
}

struct Path {
    vertices: Vec<Complex64>,
    /// branch index of each vertex, if it is one
    branch: Vec<Option<usize>>,
}

impl Path {
    fn admissible(&self, roots: &[Complex64]) -> bool {
        self.vertices.windows(2).enumerate().all(|(i, seg)| {
            roots.iter().enumerate().all(|(j, r)| {
                let endpoint = self.branch[i] == Some(j) || self.branch[i + 1] == Some(j);
                endpoint || segment_distance(*r, seg[0], seg[1]) >= PATH_CLEARANCE
            })
        })
    }
}

fn integrate_path(data: &AbelData, path: &Path, y_end: Option<Complex64>) -> Result<CVector> {
    let roots = &data.branch_points;
    let mut vertices = path.vertices.clone();
    let mut branch = path.branch.clone();
    let n = vertices.len() - 1;
    // anchor: the vertex with a known y value
    let (anchor, y_anchor) = match y_end {
        Some(y) => (n, y),
        None => {
            let m = (vertices[n - 1] + vertices[n]) * 0.5;
            vertices.insert(n, m);
            branch.insert(n, None);
            (n, poly::eval(data.poly(), m).sqrt())
        }
    };
    let mut total = [Complex64::new(0.0, 0.0); 2];
    let mut y = y_anchor;
    for i in (0..anchor).rev() {
        let seg = segment_integral(roots, vertices[i], branch[i], vertices[i + 1], y)?;
        total[0] += seg[0];
        total[1] += seg[1];
        if branch[i].is_none() {
            y *= ratio_product(roots, None, vertices[i], vertices[i + 1]);
        }
    }
    let mut y = y_anchor;
    for i in anchor..vertices.len() - 1 {
        let seg = segment_integral(roots, vertices[i + 1], branch[i + 1], vertices[i], y)?;
        total[0] -= seg[0];
        total[1] -= seg[1];
        if branch[i + 1].is_none() {
            y *= ratio_product(roots, None, vertices[i + 1], vertices[i]);
        }
    }
    Ok(&data.normalization * CVector::from_column_slice(&total))
}

fn endpoint(data: &AbelData, p: &CurvePoint) -> Result<(Complex64, Option<usize>, Option<Complex64>)> {
    match *p {
        CurvePoint::Torus(_) => Err(Error::InvalidInput("torus point on a hyperelliptic curve".into())),
        CurvePoint::Affine { x, sheet } => {
            if !x.re.is_finite() || !x.im.is_finite() {
                return Err(Error::InvalidInput("non-finite curve point".into()));
            }
            match branch_index(&data.branch_points, data.poly(), x) {
                Some(idx) => Ok((data.branch_points[idx], Some(idx), None)),
                None => Ok((x, None, Some(poly::eval(data.poly(), x).sqrt() * sheet.sign()))),
            }
        }
    }
}

/// Abel map from the basepoint to `p` (modulo the period lattice).
///
/// The path is the straight segment from `e1`, or a two-segment detour through
/// an offset midpoint when a branch point comes within [`PATH_CLEARANCE`].
pub fn abel_map(data: &AbelData, p: &CurvePoint) -> Result<CVector> {
    if let CurveSpec::Genus1 { .. } = data.curve {
        return torus_coordinate(p);
    }
    let (x, bidx, y) = endpoint(data, p)?;
    if bidx == Some(0) {
        return Ok(CVector::zeros(2));
    }
    let e1 = data.branch_points[0];
    let d = x - e1;
    let straight = Path {
        vertices: vec![e1, x],
        branch: vec![Some(0), bidx],
    };
    if straight.admissible(&data.branch_points) {
        return integrate_path(data, &straight, y);
    }
    for f in DETOUR_OFFSETS {
        let w = (e1 + x) * 0.5 + d * Complex64::new(0.0, f);
        let path = Path {
            vertices: vec![e1, w, x],
            branch: vec![Some(0), None, bidx],
        };
        if path.admissible(&data.branch_points) {
            return integrate_path(data, &path, y);
        }
    }
    Err(Error::PathFailure(format!("no admissible path from e1 to {x}")))
}

/// Abel map along the polygonal path `e1 -> waypoints -> p`.
pub fn abel_map_via(data: &AbelData, p: &CurvePoint, waypoints: &[Complex64]) -> Result<CVector> {
    if let CurveSpec::Genus1 { .. } = data.curve {
        return torus_coordinate(p);
    }
    let (x, bidx, y) = endpoint(data, p)?;
    let mut vertices = vec![data.branch_points[0]];
    vertices.extend_from_slice(waypoints);
    vertices.push(x);
    let mut branch = vec![Some(0)];
    branch.extend(waypoints.iter().map(|_| None));
    branch.push(bidx);
    let path = Path { vertices, branch };
    if !path.admissible(&data.branch_points) {
        return Err(Error::PathFailure("waypoint path passes too close to a branch point".into()));
    }
    if bidx == Some(0) && waypoints.is_empty() {
        return Ok(CVector::zeros(2));
    }
    integrate_path(data, &path, y)
}

fn torus_coordinate(p: &CurvePoint) -> Result<CVector> {
    match *p {
        CurvePoint::Torus(z) => Ok(CVector::from_element(1, z)),
        CurvePoint::Affine { .. } => Err(Error::InvalidInput("affine point on a torus".into())),
    }
}

/// Derivative of the Abel map with respect to the affine chart coordinate:
/// `N (1, x)^T / y` on the hyperelliptic model, `1` on a torus.
pub fn abel_tangent(data: &AbelData, p: &CurvePoint) -> Result<CVector> {
    match (&data.curve, *p) {
        (CurveSpec::Genus1 { .. }, CurvePoint::Torus(_)) => Ok(CVector::from_element(1, Complex64::new(1.0, 0.0))),
        (CurveSpec::Hyperelliptic2 { poly }, CurvePoint::Affine { x, sheet }) => {
            let px = poly::eval(poly, x);
            if px.norm() < BRANCH_POINT_TOL {
                return Err(Error::BranchPoint(px.norm()));
            }
            let y = px.sqrt() * sheet.sign();
            let w = CVector::from_column_slice(&[1.0 / y, x / y]);
            Ok(&data.normalization * w)
        }
        _ => Err(Error::InvalidInput("curve point does not match the curve kind".into())),
    }
}

/// Secancy vectors from four curve points:
/// `U = A(c) - A(b)`, `V = A(d) - A(b)`, `A = A(a) - A(b)`.
#[derive(Clone, Debug)]
pub struct FayVectors {
    pub u: CVector,
    pub v: CVector,
    pub a: CVector,
}

pub fn fay_vectors(
    data: &AbelData,
    a: &CurvePoint,
    b: &CurvePoint,
    c: &CurvePoint,
    d: &CurvePoint,
) -> Result<FayVectors> {
    let images = [a, b, c, d]
        .iter()
        .map(|p| abel_map(data, p))
        .collect::<Result<Vec<_>>>()?;
    let names = ["a", "b", "c", "d"];
    for i in 0..4 {
        for j in 0..i {
            let dist = data.b.lattice_distance(&(&images[i] - &images[j]));
            if dist < COINCIDENCE_TOL {
                return Err(Error::CoincidentPoints(format!(
                    "{} and {} have Abel images {dist:e} apart modulo the lattice",
                    names[j], names[i]
                )));
            }
        }
    }
    Ok(FayVectors {
        u: &images[2] - &images[1],
        v: &images[3] - &images[1],
        a: &images[0] - &images[1],
    })
}
