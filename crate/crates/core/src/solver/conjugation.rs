//! Conjugations that reduce `∂t + a(t)∂x + q(t)` to constant coefficients.
//!
//! `Ψ_a` shifts each `t`-slice in `x` by `A(t)`, turning `a(t)` into `a₀`;
//! `Ψ_q` multiplies by `e^{Q(t)}`, turning `q(t)` into `q₀`.

use serde::Serialize;

use super::apply_operator;
use crate::classifier::{classify_first_order_t, Classification};
use crate::spectral::{forward_x, inverse_x, GridFunction};
use crate::symbols::{OperatorSpec, TrigPolynomial, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Fwd,
    Inv,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Fwd => 1.0,
            Direction::Inv => -1.0,
        }
    }
}

/// Multiplies the partial `x`-transform of row `t` by `e^{±iξA(t)}`.
pub fn conjugate_psi_a(a: &TrigPolynomial, f: &GridFunction, direction: Direction) -> Result<GridFunction> {
    if !a.is_real_valued() {
        return Err(Error::Precondition("a must be real-valued".into()));
    }
    let (anti, _) = a.zero_mean_antiderivative();
    if anti.is_zero() {
        return Ok(f.clone());
    }
    let grid = f.grid;
    let mut partial = forward_x(f);
    let xis = grid.xis();
    let s = direction.sign();
    for (j, row) in partial.chunks_mut(grid.n).enumerate() {
        let big_a = anti.eval(grid.t(j)).re;
        for (v, &xi) in row.iter_mut().zip(&xis) {
            *v *= C64::from_polar(1.0, s * xi * big_a);
        }
    }
    Ok(inverse_x(grid, &partial))
}

/// Pointwise multiplication by `e^{±Q(t)}`.
pub fn conjugate_psi_q(q: &TrigPolynomial, f: &GridFunction, direction: Direction) -> GridFunction {
    let (anti, _) = q.zero_mean_antiderivative();
    if anti.is_zero() {
        return f.clone();
    }
    let s = direction.sign();
    f.scale_rows(|t| (anti.eval(t) * s).exp())
}

/// Constant-coefficient normal form of a tube operator with `b ≡ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduction {
    pub a0: f64,
    pub q0: C64,
    /// `∂t + a₀∂x + q₀`.
    pub p00: OperatorSpec,
    /// Verdict for `p00`, which the original operator shares.
    pub classification: Classification,
    #[serde(skip)]
    a: TrigPolynomial,
    #[serde(skip)]
    q: TrigPolynomial,
}

impl Reduction {
    /// `Ψ = Ψ_q ∘ Ψ_a`, or its inverse.
    pub fn psi(&self, f: &GridFunction, direction: Direction) -> Result<GridFunction> {
        match direction {
            Direction::Fwd => Ok(conjugate_psi_q(&self.q, &conjugate_psi_a(&self.a, f, direction)?, direction)),
            Direction::Inv => conjugate_psi_a(&self.a, &conjugate_psi_q(&self.q, f, direction), direction),
        }
    }
}

pub fn reduce_tube(a: &TrigPolynomial, b: &TrigPolynomial, q: &TrigPolynomial) -> Result<Reduction> {
    if !b.is_zero() {
        return Err(Error::Precondition("reduction requires b = 0; solve complex tubes fiberwise".into()));
    }
    if !a.is_real_valued() {
        return Err(Error::Precondition("a must be real-valued".into()));
    }
    let a0 = a.average().re;
    let q0 = q.average();
    Ok(Reduction {
        a0,
        q0,
        p00: OperatorSpec::first_order_t(C64::new(a0, 0.0), C64::new(1.0, 0.0), q0),
        classification: classify_first_order_t(a0, 0.0, q0),
        a: a.clone(),
        q: q.clone(),
    })
}

/// Grid residuals of the two intertwining identities on a test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugationResiduals {
    /// `max |P₀Ψ_a u − Ψ_a P u|`.
    pub psi_a: f64,
    /// `max |P₀₀Ψ_q u − Ψ_q P₀ u|`.
    pub psi_q: f64,
}

/// Checks both conjugations for `P = ∂t + a∂x + q` on `u`.
pub fn conjugation_residuals(a: &TrigPolynomial, q: &TrigPolynomial, u: &GridFunction) -> Result<ConjugationResiduals> {
    let p = OperatorSpec::tube(a.clone(), TrigPolynomial::zero(), q.clone())?;
    let p0 = p0_after_psi_a(a, q);
    let lhs = apply_operator(&p0, &conjugate_psi_a(a, u, Direction::Fwd)?)?;
    let rhs = conjugate_psi_a(a, &apply_operator(&p, u)?, Direction::Fwd)?;
    let psi_a = lhs.max_diff(&rhs);
    let red = reduce_tube(a, &TrigPolynomial::zero(), q)?;
    let lhs = apply_operator(&red.p00, &conjugate_psi_q(q, u, Direction::Fwd))?;
    let rhs = conjugate_psi_q(q, &apply_operator(&p0, u)?, Direction::Fwd);
    Ok(ConjugationResiduals { psi_a, psi_q: lhs.max_diff(&rhs) })
}

/// `P₀ = ∂t + a₀∂x + q(t)`, the operator left after `Ψ_a`.
pub fn p0_after_psi_a(a: &TrigPolynomial, q: &TrigPolynomial) -> OperatorSpec {
    OperatorSpec::TubeT { a: TrigPolynomial::real_constant(a.average().re), b: TrigPolynomial::zero(), q: q.clone() }
}
