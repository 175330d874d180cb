use serde::{Deserialize, Serialize};

use super::{ComplexPolynomial, TrigPolynomial, C64, I};
use crate::{Error, Result};

/// The operator under study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    /// `p(D_x) + q(D_t)`; symbol `p(ξ) + q(k)`.
    ConstSplit { p: ComplexPolynomial, q: ComplexPolynomial },
    /// `c₁∂x + c₂∂t + c₃`; normalized symbol `c₁ξ + c₂k − ic₃`.
    FirstOrderT { c1: C64, c2: C64, c3: C64 },
    /// `∂t + (a(t) + i b(t))∂x + q(t)` with real `a`, `b`.
    TubeT { a: TrigPolynomial, b: TrigPolynomial, q: TrigPolynomial },
}

impl OperatorSpec {
    pub fn const_split(p: ComplexPolynomial, q: ComplexPolynomial) -> Self {
        Self::ConstSplit { p, q }
    }

    pub fn first_order_t(c1: C64, c2: C64, c3: C64) -> Self {
        Self::FirstOrderT { c1, c2, c3 }
    }

    /// `∂t + (a + ib)∂x + c` with constant real `a`, `b`.
    pub fn tube_const(a: f64, b: f64, c: C64) -> Self {
        Self::first_order_t(C64::new(a, b), C64::new(1.0, 0.0), c)
    }

    pub fn tube(a: TrigPolynomial, b: TrigPolynomial, q: TrigPolynomial) -> Result<Self> {
        if !a.is_real_valued() || !b.is_real_valued() {
            return Err(Error::Precondition("tube coefficients a and b must be real-valued".into()));
        }
        Ok(Self::TubeT { a, b, q })
    }

    /// Constant-coefficient first-order form of a tube operator whose
    /// coefficients are all constant.
    pub fn tube_as_first_order(&self) -> Option<Self> {
        match self {
            Self::TubeT { a, b, q } if a.is_constant() && b.is_constant() && q.is_constant() => {
                Some(Self::first_order_t(C64::new(a.average().re, b.average().re), C64::new(1.0, 0.0), q.average()))
            }
            _ => None,
        }
    }

    /// Split form with the same zero set: `p(ξ) = c₁ξ − ic₃`, `q(k) = c₂k`.
    pub fn to_const_split(&self) -> Option<Self> {
        match self {
            Self::ConstSplit { .. } => Some(self.clone()),
            Self::FirstOrderT { c1, c2, c3 } => Some(Self::const_split(
                ComplexPolynomial::new(vec![-I * c3, *c1]),
                ComplexPolynomial::new(vec![C64::new(0.0, 0.0), *c2]),
            )),
            Self::TubeT { .. } => self.tube_as_first_order()?.to_const_split(),
        }
    }

    /// Normalized symbol at the lattice point `(k, ξ)`.
    pub fn symbol_at(&self, k: i64, xi: f64) -> Result<C64> {
        match self {
            Self::ConstSplit { p, q } => Ok(p.eval(xi) + q.eval(k as f64)),
            Self::FirstOrderT { c1, c2, c3 } => Ok(c1 * xi + c2 * k as f64 - I * c3),
            Self::TubeT { .. } => match self.tube_as_first_order() {
                Some(op) => op.symbol_at(k, xi),
                None => Err(Error::SymbolNotPointwise),
            },
        }
    }

    /// `m` with `P e^{i(kt+ξx)} = m e^{i(kt+ξx)}`; real `k` is allowed so
    /// the same formula serves as a Fourier multiplier.
    pub fn action_multiplier(&self, k: f64, xi: f64) -> Result<C64> {
        match self {
            Self::ConstSplit { p, q } => Ok(p.eval(xi) + q.eval(k)),
            Self::FirstOrderT { c1, c2, c3 } => Ok(I * (c1 * xi + c2 * k) + c3),
            Self::TubeT { .. } => match self.tube_as_first_order() {
                Some(op) => op.action_multiplier(k, xi),
                None => Err(Error::SymbolNotPointwise),
            },
        }
    }

    /// True for the variants with a pointwise symbol.
    pub fn is_constant_coefficient(&self) -> bool {
        !matches!(self, Self::TubeT { .. }) || self.tube_as_first_order().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn split_symbol_cancels() {
        let op = OperatorSpec::const_split(
            ComplexPolynomial::from_real(&[0.0, 1.0]),
            ComplexPolynomial::from_real(&[0.0, 1.0]),
        );
        assert_eq!(op.symbol_at(1, -1.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn first_order_symbol_vanishes_at_witness() {
        let op = OperatorSpec::first_order_t(c(1.0, 1.0), c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(op.symbol_at(-1, 1.0).unwrap(), c(0.0, 0.0));
        assert_eq!(op.action_multiplier(-1.0, 1.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn quadratic_split_symbol() {
        let op = OperatorSpec::const_split(
            ComplexPolynomial::new(vec![c(0.0, 1.0), c(1.0, 0.0), c(0.0, -1.0)]),
            ComplexPolynomial::from_real(&[0.0, -1.0, 1.0]),
        );
        assert_eq!(op.symbol_at(0, 1.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn variable_tube_has_no_pointwise_symbol() {
        let op = OperatorSpec::tube(TrigPolynomial::zero(), TrigPolynomial::cos(1.0), TrigPolynomial::zero()).unwrap();
        assert!(matches!(op.symbol_at(0, 0.0), Err(Error::SymbolNotPointwise)));
    }

    #[test]
    fn complex_a_is_rejected() {
        let a = TrigPolynomial::constant(c(0.0, 1.0));
        assert!(OperatorSpec::tube(a, TrigPolynomial::zero(), TrigPolynomial::zero()).is_err());
    }

    #[test]
    fn split_form_shares_zero_set() {
        let op = OperatorSpec::first_order_t(c(1.0, 2.0), c(1.0, 0.0), c(0.5, -0.25));
        let split = op.to_const_split().unwrap();
        for (k, xi) in [(0, 0.0), (3, -1.5), (-2, 0.7)] {
            let d = op.symbol_at(k, xi).unwrap() - split.symbol_at(k, xi).unwrap();
            assert!(d.norm() < 1e-15);
        }
    }
}
