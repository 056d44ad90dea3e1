//! Browser bindings: a genus-one theta heatmap, the trisecant fit on the
//! reference genus-two curve, and a Ruijsenaars-Schneider trajectory.
//! Build with `wasm-pack build --target web` and open `www/index.html`.

use std::cell::OnceCell;

use num_complex::Complex64;
use theta_secant::curve::{build_abel_data, fay_vectors, AbelData, CurvePoint, CurveSpec, Sheet};
use theta_secant::kummer::fit_secancy_discrete;
use theta_secant::rng;
use theta_secant::series::{rs_integrate, RsKernel, RsState};
use theta_secant::theta::{theta_value, PeriodMatrix};
use theta_secant::{CVector, Error};
use wasm_bindgen::prelude::*;

// errors cross the boundary as strings, which also keeps native tests free of JsValue
fn js(e: Error) -> String {
    e.to_string()
}

/// Normalized `|theta(x + tau y)|` on a `cells x cells` grid over the unit
/// cell, row-major in `y`.
#[wasm_bindgen]
pub fn theta_heatmap(tau_re: f64, tau_im: f64, cells: usize) -> Result<Vec<f64>, String> {
    if !(1..=512).contains(&cells) {
        return Err("cells must lie in 1..=512".into());
    }
    let tau = Complex64::new(tau_re, tau_im);
    let b = PeriodMatrix::from_rows(1, &[tau]).map_err(js)?;
    let mut out = Vec::with_capacity(cells * cells);
    for j in 0..cells {
        for i in 0..cells {
            let (x, y) = ((i as f64 + 0.5) / cells as f64, (j as f64 + 0.5) / cells as f64);
            let z = CVector::from_element(1, tau * y + x);
            out.push(theta_value(&b, &z).map_err(js)?.normalized_abs());
        }
    }
    Ok(out)
}

thread_local! {
    static REFERENCE: OnceCell<Result<AbelData, String>> = const { OnceCell::new() };
}

fn with_reference<T>(f: impl FnOnce(&AbelData) -> Result<T, Error>) -> Result<T, String> {
    REFERENCE.with(|cell| {
        match cell.get_or_init(|| build_abel_data(&CurveSpec::x5_minus_1()).map_err(|e| e.to_string())) {
            Ok(data) => f(data).map_err(js),
            Err(msg) => Err(msg.clone()),
        }
    })
}

/// Discrete secancy residuals on `y^2 = x^5 - 1` for a seeded point tuple:
/// `[exact Abel data, same data with U[0] moved by perturbation]`.
#[wasm_bindgen]
pub fn trisecant_residuals(seed: u32, perturbation: f64) -> Result<Vec<f64>, String> {
    with_reference(|data| {
        let b = data.period_matrix();
        let mut r = rng::seeded(seed as u64);
        let mut last = Error::InvalidInput("no admissible tuple".into());
        for _ in 0..20 {
            let pts: Vec<CurvePoint> = (0..4)
                .map(|_| {
                    let x = rng::complex_in_box(&mut r, 1.5);
                    let sheet = if rng::complex_in_box(&mut r, 1.0).re >= 0.0 { Sheet::Plus } else { Sheet::Minus };
                    CurvePoint::affine(x, sheet)
                })
                .collect();
            match fay_vectors(data, &pts[0], &pts[1], &pts[2], &pts[3]) {
                Ok(f) => {
                    let exact = fit_secancy_discrete(&f.u, &f.v, &f.a, b)?.residual;
                    let mut u = f.u.clone();
                    u[0] += perturbation;
                    let moved = fit_secancy_discrete(&u, &f.v, &f.a, b)?.residual;
                    return Ok(vec![exact, moved]);
                }
                Err(e) => last = e,
            }
        }
        Err(last)
    })
}

/// Trajectory of `n` particles as rows `[t, re x_1, im x_1, ..., re x_n, im x_n]`
/// flattened; `kernel` is `rational`, `trigonometric` (period 3) or
/// `elliptic` (periods 3, 3i).
#[wasm_bindgen]
pub fn rs_trajectory(n: usize, t_end: f64, h: f64, seed: u32, kernel: &str) -> Result<Vec<f64>, String> {
    if !(1..=8).contains(&n) || !(t_end > 0.0 && t_end <= 10.0) || !(h >= 1e-4 && h <= t_end) {
        return Err("need 1 <= n <= 8, 0 < t_end <= 10, 1e-4 <= h <= t_end".into());
    }
    let kernel = match kernel {
        "rational" => RsKernel::Rational,
        "trigonometric" => RsKernel::trigonometric(Complex64::new(3.0, 0.0)).map_err(js)?,
        "elliptic" => RsKernel::elliptic(Complex64::new(3.0, 0.0), Complex64::new(0.0, 3.0)).map_err(js)?,
        other => return Err(format!("unknown kernel {other:?}")),
    };
    let mut r = rng::seeded(seed as u64);
    let x = (0..n)
        .map(|i| Complex64::new(1.7 * i as f64, 0.3) + rng::complex_in_box(&mut r, 0.2))
        .collect();
    let xdot = (0..n).map(|_| rng::complex_in_box(&mut r, 0.5)).collect();
    let traj = rs_integrate(&RsState::new(x, xdot, kernel).map_err(js)?, t_end, h).map_err(js)?;
    let mut out = Vec::with_capacity(traj.t.len() * (1 + 2 * n));
    for (t, xs) in traj.t.iter().zip(&traj.x) {
        out.push(*t);
        for x in xs {
            out.extend([x.re, x.im]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heatmap_vanishes_only_near_the_odd_half_period() {
        let map = theta_heatmap(0.0, 1.0, 9).unwrap();
        assert_eq!(map.len(), 81);
        let (argmin, _) = map.iter().enumerate().fold((0, f64::MAX), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
        // cell centre (4.5/9, 4.5/9) is the zero (1 + tau)/2
        assert_eq!(argmin, 4 * 9 + 4);
        assert!(map[argmin] < 1e-12);
        assert!(map.iter().enumerate().all(|(k, &v)| k == argmin || v > 1e-3));
    }

    #[test]
    fn jacobian_tuple_fits_and_perturbation_breaks_it() {
        let r = trisecant_residuals(3, 0.05).unwrap();
        assert!(r[0] <= 1e-8, "{r:?}");
        assert!(r[1] >= 1e-4, "{r:?}");
    }

    #[test]
    fn lone_particle_is_free() {
        let rows = rs_trajectory(1, 1.0, 0.01, 1, "elliptic").unwrap();
        assert_eq!(rows.len(), 101 * 3);
        let (x0, y0) = (rows[1], rows[2]);
        let (x1, y1) = (rows[rows.len() - 2], rows[rows.len() - 1]);
        let (vx, vy) = ((rows[4] - x0) / 0.01, (rows[5] - y0) / 0.01);
        assert!((x1 - x0 - vx).abs() < 1e-12 && (y1 - y0 - vy).abs() < 1e-12);
        assert!(rs_trajectory(2, 1.0, 0.01, 1, "hyperbolic").is_err());
    }
}
