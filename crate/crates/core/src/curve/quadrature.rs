//! Gauss–Legendre quadrature on `[0, 1]` with node doubling.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const START_NODES: usize = 16;
pub const MAX_NODES: usize = 1 << 13;
pub const CONVERGENCE: f64 = 1e-10;

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

fn cache() -> &'static Mutex<HashMap<usize, Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    if let Some(rule) = cache().lock().expect("quadrature cache poisoned").get(&n) {
        return rule.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let rule = Arc::new((nodes, weights));
    cache()
        .lock()
        .expect("quadrature cache poisoned")
        .insert(n, rule.clone());
    rule
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-rule integral over `[0, 1]` of a vector-valued integrand.
pub fn integrate_fixed<const K: usize>(f: &impl Fn(f64) -> [Complex64; K], n: usize) -> [Complex64; K] {
    let rule = gauss_legendre(n);
    let mut acc = [Complex64::new(0.0, 0.0); K];
    for (x, w) in rule.0.iter().zip(&rule.1) {
        let v = f(0.5 * (x + 1.0));
        for k in 0..K {
            acc[k] += v[k] * (0.5 * w);
        }
    }
    acc
}

/// Integral over `[0, 1]`, doubling the node count from 16 until successive
/// results differ by less than `1e-10 * (1 + |value|)` in every component.
pub fn integrate<const K: usize>(f: impl Fn(f64) -> [Complex64; K]) -> Result<[Complex64; K]> {
    let mut n = START_NODES;
    let mut prev = integrate_fixed(&f, n);
    loop {
        n *= 2;
        let next = integrate_fixed(&f, n);
        let change = (0..K)
            .map(|k| (next[k] - prev[k]).norm() / (1.0 + next[k].norm()))
            .fold(0.0, f64::max);
        if !change.is_finite() {
            return Err(Error::QuadratureStall { nodes: n, change });
        }
        if change < CONVERGENCE {
            return Ok(next);
        }
        if n * 2 > MAX_NODES {
            return Err(Error::QuadratureStall { nodes: n, change });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = gauss_legendre(16);
        // degree 31 is the exactness limit of a 16-point rule
        let s: f64 = rule.0.iter().zip(&rule.1).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        let total: f64 = rule.1.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn smooth_integrand_converges() {
        let v = integrate(|t| [Complex64::new(0.0, t).exp()]).unwrap();
        let exact = (Complex64::new(0.0, 1.0).exp() - 1.0) / Complex64::new(0.0, 1.0);
        assert!((v[0] - exact).norm() < 1e-14);
    }

    #[test]
    fn endpoint_singularity_stalls() {
        let r = integrate(|t| [Complex64::new(t.powf(-0.5), 0.0)]);
        assert!(matches!(r, Err(Error::QuadratureStall { .. })));
    }
}
