//! Zeros of holomorphic functions of one complex variable: argument-principle
//! bracketing on a rectangular grid followed by Newton refinement.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::theta::ScaledComplex;

/// Axis-aligned rectangle `[lo.re, hi.re] x [lo.im, hi.im]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Rect {
    pub fn new(lo: Complex64, hi: Complex64) -> Self {
        Rect { lo, hi }
    }

    pub fn center(&self) -> Complex64 {
        (self.lo + self.hi) * 0.5
    }

    pub fn contains(&self, s: Complex64, margin: f64) -> bool {
        s.re >= self.lo.re - margin && s.re <= self.hi.re + margin && s.im >= self.lo.im - margin && s.im <= self.hi.im + margin
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ]
    }

    /// `n x n` subcells in row-major order.
    pub fn grid(&self, n: usize) -> Vec<Rect> {
        let d = self.hi - self.lo;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let lo = self.lo + Complex64::new(d.re * i as f64 / n as f64, d.im * j as f64 / n as f64);
                let hi = self.lo + Complex64::new(d.re * (i + 1) as f64 / n as f64, d.im * (j + 1) as f64 / n as f64);
                out.push(Rect { lo, hi });
            }
        }
        out
    }
}

const EDGE_SAMPLES: usize = 8;
const MAX_DEPTH: u32 = 12;
const MAX_PHASE_STEP: f64 = PI / 4.0;

/// Phase change of `f` along the segment `a -> b`, refined until consecutive
/// samples differ by less than `pi/4` in argument.
fn phase_change(
    f: &impl Fn(Complex64) -> Result<ScaledComplex>,
    a: Complex64,
    fa: ScaledComplex,
    b: Complex64,
    fb: ScaledComplex,
    depth: u32,
) -> Result<f64> {
    if fa.is_zero() || fb.is_zero() {
        return Ok(0.0);
    }
    let step = (fb / fa).mantissa().arg();
    if step.abs() <= MAX_PHASE_STEP || depth >= MAX_DEPTH {
        return Ok(step);
    }
    let m = (a + b) * 0.5;
    let fm = f(m)?;
    Ok(phase_change(f, a, fa, m, fm, depth + 1)? + phase_change(f, m, fm, b, fb, depth + 1)?)
}

/// Number of zeros of `f` inside `rect` (winding number of `f` along its boundary).
pub fn winding_number(f: &impl Fn(Complex64) -> Result<ScaledComplex>, rect: &Rect) -> Result<i64> {
    let corners = rect.corners();
    let mut total = 0.0;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let mut prev = a;
        let mut fprev = f(a)?;
        for j in 1..=EDGE_SAMPLES {
            let s = a + (b - a) * (j as f64 / EDGE_SAMPLES as f64);
            let fs = f(s)?;
            total += phase_change(f, prev, fprev, s, fs, 0)?;
            prev = s;
            fprev = fs;
        }
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Cells of an `n x n` grid over `rect` that contain zeros, with their counts.
pub fn bracket_zeros(
    f: &impl Fn(Complex64) -> Result<ScaledComplex>,
    rect: &Rect,
    n: usize,
) -> Result<Vec<(Rect, i64)>> {
    let mut out = Vec::new();
    for cell in rect.grid(n) {
        let w = winding_number(f, &cell)?;
        if w > 0 {
            out.push((cell, w));
        }
    }
    Ok(out)
}

/// Newton iteration on `s -> (f, f')`; returns the limit if the steps shrink
/// below `1e-14 (1 + |s|)` within 60 iterations.
pub fn newton(f_df: &impl Fn(Complex64) -> Result<(ScaledComplex, ScaledComplex)>, s0: Complex64) -> Result<Option<Complex64>> {
    let mut s = s0;
    for _ in 0..60 {
        let (v, d) = f_df(s)?;
        if v.is_zero() {
            return Ok(Some(s));
        }
        if d.is_zero() {
            return Ok(None);
        }
        let step = (v / d).to_complex();
        if !step.re.is_finite() || !step.im.is_finite() {
            return Ok(None);
        }
        s -= step;
        if step.norm() <= 1e-14 * (1.0 + s.norm()) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn counts_polynomial_zeros() {
        // zeros at 0.3, -0.5+0.5i (double)
        let f = |s: Complex64| Ok(ScaledComplex::from((s - 0.3) * (s - c(-0.5, 0.5)).powu(2)));
        let whole = Rect::new(c(-1.0, -1.0), c(1.0, 1.0));
        assert_eq!(winding_number(&f, &whole).unwrap(), 3);
        let cells = bracket_zeros(&f, &whole, 8).unwrap();
        let total: i64 = cells.iter().map(|(_, w)| w).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn newton_converges_to_simple_zero() {
        let f = |s: Complex64| Ok((ScaledComplex::from(s * s + 1.0), ScaledComplex::from(s * 2.0)));
        let z = newton(&f, c(0.2, 0.7)).unwrap().unwrap();
        assert!((z - c(0.0, 1.0)).norm() < 1e-14);
    }
}
