//! Numerical verification of the trisecant characterization of Jacobians.
//!
//! Layers, bottom up:
//!
//! * [`theta`]: Riemann theta functions with characteristics, derivatives and
//!   level-two vectors, evaluated with certified truncation and detached scales.
//! * [`curve`]: period matrices and Abel maps of genus-1 tori and genus-2
//!   hyperelliptic curves.
//! * [`kummer`]: the Kummer map, collinearity and the secancy fits.
//! * [`divisor`]: theta-divisor sampling and the divisor identities.
//! * [`lattice`]: theta-functional solutions of the Toda and discrete Hirota
//!   linear problems.
//! * [`series`]: zero tracking, pole dynamics and wave-series recursions.
//! * [`scenario`]: the batch runner behind the CLI.

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kummer;
pub mod lattice;
pub mod curve;
pub mod divisor;
pub mod rng;
pub mod roots;
pub mod scenario;
pub mod series;
pub mod theta;

pub use error::{Error, Result};

/// Complex column vector used for points of `C^g`.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;
