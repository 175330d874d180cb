//! Spectral analysis of differential operators on the cylinder `T¹ × R`.
//!
//! Operators are either constant-coefficient (`p(D_x) + q(D_t)`, or the
//! first-order form `c₁∂x + c₂∂t + c₃`) or of tube type
//! `∂t + (a(t) + i b(t))∂x + q(t)` with trigonometric-polynomial coefficients.
//! The crate decides global hypoellipticity, solves `Pu = f` on the Fourier
//! side and builds explicit counterexamples when the decision is negative.

// Parameter checks use `!(x > 0.0)` on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod counterexamples;
mod error;
pub mod exec;
mod numeric;
pub mod oracles;
pub mod solver;
pub mod spectral;
pub mod symbols;
pub mod zeroset;

pub use error::{Error, Result};
pub use symbols::{ComplexPolynomial, OperatorSpec, RealPolynomial, TrigPolynomial, C64};
