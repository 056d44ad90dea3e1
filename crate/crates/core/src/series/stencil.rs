//! Interpolation weights on short, possibly non-uniform grids.

use crate::curve::quadrature::gauss_legendre;

/// Points per stencil.
pub(crate) const WIDTH: usize = 5;

/// First node of the stencil used around index `j` of an `m`-point grid.
pub(crate) fn start(j: usize, m: usize) -> usize {
    j.saturating_sub(WIDTH / 2).min(m - WIDTH)
}

fn basis(nodes: &[f64], at: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != i)
                .map(|(_, &xl)| (at - xl) / (nodes[i] - xl))
                .product()
        })
        .collect()
}

fn basis_derivative(nodes: &[f64], at: f64) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|i| {
            let mut total = 0.0;
            for m in (0..n).filter(|&m| m != i) {
                let mut term = 1.0 / (nodes[i] - nodes[m]);
                for l in (0..n).filter(|&l| l != i && l != m) {
                    term *= (at - nodes[l]) / (nodes[i] - nodes[l]);
                }
                total += term;
            }
            total
        })
        .collect()
}

/// For each grid index, the stencil start and the weights of the derivative
/// of the local interpolant at that node.
pub(crate) fn derivative_weights(t: &[f64]) -> Vec<(usize, Vec<f64>)> {
    (0..t.len())
        .map(|j| {
            let s = start(j, t.len());
            (s, basis_derivative(&t[s..s + WIDTH], t[j]))
        })
        .collect()
}

/// For each interval `[t_j, t_{j+1}]`, the stencil start and the weights of
/// the integral of the local interpolant over that interval.
pub(crate) fn interval_weights(t: &[f64]) -> Vec<(usize, Vec<f64>)> {
    let rule = gauss_legendre(3);
    let (nodes, weights) = (&rule.0, &rule.1);
    (0..t.len() - 1)
        .map(|j| {
            let s = start(j, t.len());
            let (a, b) = (t[j], t[j + 1]);
            let mut w = vec![0.0; WIDTH];
            for (g, wg) in nodes.iter().zip(weights) {
                let at = 0.5 * (a + b) + 0.5 * (b - a) * g;
                for (wi, li) in w.iter_mut().zip(basis(&t[s..s + WIDTH], at)) {
                    *wi += 0.5 * (b - a) * wg * li;
                }
            }
            (s, w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartics() {
        let t: Vec<f64> = (0..9).map(|j| 0.3 + 0.1 * j as f64 + 0.01 * (j * j) as f64).collect();
        let f = |x: f64| 1.0 - 2.0 * x + x.powi(3) - 0.5 * x.powi(4);
        let df = |x: f64| -2.0 + 3.0 * x * x - 2.0 * x.powi(3);
        let int = |x: f64| x - x * x + x.powi(4) / 4.0 - 0.1 * x.powi(5);
        for (j, (s, w)) in derivative_weights(&t).into_iter().enumerate() {
            let d: f64 = (0..WIDTH).map(|i| w[i] * f(t[s + i])).sum();
            assert!((d - df(t[j])).abs() < 1e-11);
        }
        for (j, (s, w)) in interval_weights(&t).into_iter().enumerate() {
            let q: f64 = (0..WIDTH).map(|i| w[i] * f(t[s + i])).sum();
            assert!((q - (int(t[j + 1]) - int(t[j]))).abs() < 1e-13);
        }
    }
}
