//! Coefficients and symbols of the operators under study.
//!
//! Symbols follow the `D = -i∂` convention, so `∂_t e^{ikt} = ik e^{ikt}`.

mod operator;
mod polynomial;
mod trig;

pub use operator::OperatorSpec;
pub use polynomial::{ComplexPolynomial, RealPolynomial};
pub use trig::{TrigPolynomial, TrigTerm};

pub type C64 = num_complex::Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
