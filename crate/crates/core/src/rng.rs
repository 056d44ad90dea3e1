//! Seeded sampling helpers.
//!
//! All randomness goes through `Xoshiro256PlusPlus` seeded via SplitMix64
//! (`seed_from_u64`), so a seed reproduces the same stream on every platform.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::Result;
use crate::theta::PeriodMatrix;
use crate::CVector;

pub type SeededRng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> SeededRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Complex number with real and imaginary parts uniform in `[-r, r)`.
pub fn complex_in_box(rng: &mut SeededRng, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

pub fn complex_vector(rng: &mut SeededRng, g: usize, r: f64) -> CVector {
    CVector::from_iterator(g, (0..g).map(|_| complex_in_box(rng, r)))
}

/// Point `x + B y` with `x, y` uniform in `[0, 1)^g`, i.e. uniform in the
/// period parallelogram.
pub fn cell_vector(rng: &mut SeededRng, b: &PeriodMatrix) -> CVector {
    let g = b.genus();
    let x: Vec<f64> = (0..g).map(|_| rng.gen_range(0.0..1.0)).collect();
    let y: Vec<f64> = (0..g).map(|_| rng.gen_range(0.0..1.0)).collect();
    b.lattice_vector(&x, &y)
}

/// Random point of the Siegel upper half space with well-conditioned `Im B`.
///
/// `Im B = M M^T + 0.5 I` with `M` uniform in `[-0.5, 0.5)`, real part uniform in `[-0.5, 0.5)`.
pub fn period_matrix(rng: &mut SeededRng, g: usize) -> Result<PeriodMatrix> {
    let m = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
    let im = &m * m.transpose() + DMatrix::identity(g, g) * 0.5;
    let mut re = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
    re = (&re + re.transpose()) * 0.5;
    PeriodMatrix::new(DMatrix::from_fn(g, g, |j, k| Complex64::new(re[(j, k)], im[(j, k)])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = complex_vector(&mut seeded(7), 3, 1.0);
        let b = complex_vector(&mut seeded(7), 3, 1.0);
        assert_eq!(a, b);
        assert_ne!(a, complex_vector(&mut seeded(8), 3, 1.0));
    }

    #[test]
    fn random_period_matrices_are_valid() {
        let mut rng = seeded(1);
        for g in 1..=3 {
            let b = period_matrix(&mut rng, g).unwrap();
            assert!(b.min_eigenvalue() >= 0.5 - 1e-12);
        }
    }
}
