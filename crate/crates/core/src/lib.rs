//! Numerical laboratory for planar Beltrami equations with two
//! characteristics,
//!
//! ```text
//! f_zbar = μ(z) f_z + ν(z) conj(f_z),
//! ```
//!
//! under hydrodynamic normalization `f(z) = z + o(1)` at infinity.
//!
//! The crate builds principal solutions for truncated coefficients, follows
//! them along a ladder of truncation levels, inverts them, and evaluates the
//! dilatation, modulus and normality diagnostics that accompany the theory.
//! A closed-form family ([`oracle`]) serves as ground truth.

// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod coefficients;
pub mod transforms;
pub mod quadrature;
pub mod oracle;
pub mod solver;
pub mod dilatation;
pub mod analysis;
pub mod io;
pub mod cli;

pub use error::{Error, Result};
pub use num_complex::Complex64;
