//! Complex numbers with a detached exponential scale.
//!
//! Theta values grow like `exp(pi * Im(z)^T (Im B)^-1 Im(z))`, so products of
//! a handful of them overflow `f64` long before anything interesting happens.
//! A [`ScaledComplex`] stores `mantissa * exp(logscale)` with the mantissa
//! modulus kept in `[1, e)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    mantissa: Complex64,
    logscale: f64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mantissa: Complex64::new(0.0, 0.0),
        logscale: 0.0,
    };
    pub const ONE: ScaledComplex = ScaledComplex {
        mantissa: Complex64::new(1.0, 0.0),
        logscale: 0.0,
    };

    /// `mantissa * exp(logscale)`, renormalized.
    pub fn new(mantissa: Complex64, logscale: f64) -> Self {
        let mut s = ScaledComplex { mantissa, logscale };
        s.normalize();
        s
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0.0)
    }

    /// `exp(w)` for complex `w` without ever forming the exponential of the real part.
    pub fn exp(w: Complex64) -> Self {
        Self::new(Complex64::from_polar(1.0, w.im), w.re)
    }

    fn normalize(&mut self) {
        let r = self.mantissa.norm();
        if r == 0.0 || !r.is_finite() {
            if r == 0.0 {
                *self = Self::ZERO;
            }
            return;
        }
        let k = r.ln().floor();
        if k != 0.0 {
            self.mantissa /= k.exp();
            self.logscale += k;
        }
        // guard against rounding pushing the modulus to exactly e or below 1
        let r = self.mantissa.norm();
        if r >= std::f64::consts::E {
            self.mantissa /= std::f64::consts::E;
            self.logscale += 1.0;
        } else if r < 1.0 {
            self.mantissa *= std::f64::consts::E;
            self.logscale -= 1.0;
        }
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn logscale(&self) -> f64 {
        self.logscale
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().ln() + self.logscale
        }
    }

    /// Principal complex logarithm.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs(), self.mantissa.arg())
    }

    /// Plain complex value; overflows to infinity (or underflows to zero) for extreme scales.
    pub fn to_complex(&self) -> Complex64 {
        self.mantissa * self.logscale.exp()
    }

    /// Value expressed relative to `exp(logscale)`.
    pub fn at_scale(&self, logscale: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.mantissa * (self.logscale - logscale).exp()
    }

    pub fn abs(&self) -> f64 {
        self.mantissa.norm() * self.logscale.exp()
    }

    pub fn conj(&self) -> Self {
        ScaledComplex {
            mantissa: self.mantissa.conj(),
            logscale: self.logscale,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.mantissa * c, self.logscale)
    }

    pub fn recip(&self) -> Self {
        Self::new(self.mantissa.inv(), -self.logscale)
    }
}

/// Largest logscale among the nonzero entries (0 if all are zero).
pub fn common_logscale(values: &[ScaledComplex]) -> f64 {
    values
        .iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.logscale)
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))))
        .unwrap_or(0.0)
}

/// Express all values at one shared scale; returns the mantissas and that scale.
pub fn to_common_scale(values: &[ScaledComplex]) -> (Vec<Complex64>, f64) {
    let scale = common_logscale(values);
    (values.iter().map(|v| v.at_scale(scale)).collect(), scale)
}

/// `|sum| / (sum of |terms| + floor)` evaluated without overflow.
pub fn relative_sum_residual(terms: &[ScaledComplex], floor: f64) -> f64 {
    let (m, _) = to_common_scale(terms);
    let total: Complex64 = m.iter().sum();
    let mag: f64 = m.iter().map(|c| c.norm()).sum();
    total.norm() / (mag + floor)
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, rhs: Self) -> Self {
        ScaledComplex::new(self.mantissa * rhs.mantissa, self.logscale + rhs.logscale)
    }
}

impl Div for ScaledComplex {
    type Output = ScaledComplex;
    fn div(self, rhs: Self) -> Self {
        ScaledComplex::new(self.mantissa / rhs.mantissa, self.logscale - rhs.logscale)
    }
}

impl Add for ScaledComplex {
    type Output = ScaledComplex;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let s = self.logscale.max(rhs.logscale);
        ScaledComplex::new(self.at_scale(s) + rhs.at_scale(s), s)
    }
}

impl Sub for ScaledComplex {
    type Output = ScaledComplex;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;
    fn neg(self) -> Self {
        ScaledComplex {
            mantissa: -self.mantissa,
            logscale: self.logscale,
        }
    }
}

impl From<Complex64> for ScaledComplex {
    fn from(z: Complex64) -> Self {
        ScaledComplex::from_complex(z)
    }
}

impl fmt::Debug for ScaledComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} * e^{})", self.mantissa, self.logscale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mantissa_stays_normalized() {
        let s = ScaledComplex::new(Complex64::new(1e300, -3e299), 12.0);
        let r = s.mantissa().norm();
        assert!((1.0..std::f64::consts::E).contains(&r));
        let back = s.ln_abs();
        assert!((back - (Complex64::new(1e300, -3e299).norm().ln() + 12.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_is_absorbing_and_neutral() {
        let a = ScaledComplex::new(Complex64::new(2.0, 1.0), 5.0);
        assert!((a * ScaledComplex::ZERO).is_zero());
        assert_eq!(a + ScaledComplex::ZERO, a);
        assert!((a - a).is_zero());
    }

    #[test]
    fn huge_products_do_not_overflow() {
        let a = ScaledComplex::exp(Complex64::new(800.0, 0.3));
        let b = a * a * a;
        assert!((b.ln_abs() - 2400.0).abs() < 1e-9);
        assert!((b.mantissa().arg() - 0.9).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_plain_complex(
            ar in -5.0f64..5.0, ai in -5.0f64..5.0,
            br in -5.0f64..5.0, bi in -5.0f64..5.0,
        ) {
            let a = Complex64::new(ar, ai);
            let b = Complex64::new(br, bi);
            let sa = ScaledComplex::from(a);
            let sb = ScaledComplex::from(b);
            let tol = 1e-12 * (1.0 + a.norm() * b.norm() + a.norm() + b.norm());
            prop_assert!(((sa * sb).to_complex() - a * b).norm() < tol);
            prop_assert!(((sa + sb).to_complex() - (a + b)).norm() < tol);
            prop_assert!(((sa - sb).to_complex() - (a - b)).norm() < tol);
            if b.norm() > 1e-3 {
                prop_assert!(((sa / sb).to_complex() - a / b).norm() < 1e-9 * (1.0 + (a / b).norm()));
            }
        }
    }
}
