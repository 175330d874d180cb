//! Global-hypoellipticity decisions with certificates and validity ranges.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::numeric::{golden_min, nearest_integer};
use crate::symbols::{OperatorSpec, TrigPolynomial, C64, I};
use crate::zeroset::{
    certify_lower_bound_with, find_zeros, uniform_gap, LowerBound, LowerBoundCertificate, LowerBoundOptions,
    ZeroSearch, ZeroWitness,
};
use crate::{exec::Exec, Error, Result};

/// Values this close to an integer count as integers; the report flags them.
pub const INT_TOL: f64 = 1e-9;

/// Relative tolerance for sign decisions on `b`, as a fraction of `‖b‖∞`.
pub const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "GH")]
    Gh,
    #[serde(rename = "NotGH")]
    NotGh,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Gh => "GH",
            Verdict::NotGh => "NotGH",
            Verdict::Undecided => "Undecided",
        })
    }
}

/// Which regularity notion the verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Notion {
    /// Fixed Gevrey order in t and Gelfand–Shilov order in x.
    #[serde(rename = "S_sigma_mu")]
    SSigmaMu,
    /// Any Gevrey order in t; loss of t-regularity allowed.
    #[serde(rename = "F_mu")]
    FMu,
}

/// `[lo, ∞)` or `(lo, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuInterval {
    pub lo: f64,
    pub lo_inclusive: bool,
}

impl MuInterval {
    pub const FROM_HALF: Self = Self { lo: 0.5, lo_inclusive: true };
    pub const FROM_ONE: Self = Self { lo: 1.0, lo_inclusive: true };
    pub const ABOVE_ONE: Self = Self { lo: 1.0, lo_inclusive: false };

    pub fn contains(&self, mu: f64) -> bool {
        if self.lo_inclusive {
            mu >= self.lo
        } else {
            mu > self.lo
        }
    }
}

impl fmt::Display for MuInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = if self.lo == 0.5 { "1/2".to_string() } else { format!("{}", self.lo) };
        write!(f, "{}{lo},inf)", if self.lo_inclusive { "[" } else { "(" })
    }
}

impl Serialize for MuInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MuInterval", 3)?;
        st.serialize_field("lo", &self.lo)?;
        st.serialize_field("lo_inclusive", &self.lo_inclusive)?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    Witness {
        witness: ZeroWitness,
    },
    Criterion {
        condition: String,
        values: BTreeMap<String, f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<ZeroWitness>,
    },
    LowerBound {
        lower_bound: LowerBoundCertificate,
        zeros: ZeroSearch,
    },
    /// Evidence gathered when no decision could be reached.
    Partial {
        zeros: ZeroSearch,
        lower_bound: Option<LowerBound>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub theorem: String,
    pub certificate: Certificate,
    pub mu_validity: MuInterval,
    pub sigma_validity: String,
    pub notion: Notion,
    /// An integrality test landed within `INT_TOL` of an integer.
    pub boundary_case: bool,
}

impl Classification {
    fn new(verdict: Verdict, theorem: &str, certificate: Certificate, mu: MuInterval) -> Self {
        Self {
            verdict,
            theorem: theorem.to_string(),
            certificate,
            mu_validity: mu,
            sigma_validity: "all sigma >= 1".to_string(),
            notion: Notion::SSigmaMu,
            boundary_case: false,
        }
    }

    /// The zero witness carried by a negative verdict, if any.
    pub fn witness(&self) -> Option<ZeroWitness> {
        match &self.certificate {
            Certificate::Witness { witness } => Some(*witness),
            Certificate::Criterion { witness, .. } => *witness,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budgets {
    pub k_budget: i64,
    pub xi_samples: usize,
    /// Inner radius of the growth-bound sampling.
    pub r: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { k_budget: 64, xi_samples: 400, r: 1.0 }
    }
}

const THM_ZERO: &str = "symbol zero on ZxR obstructs global hypoellipticity";
const THM_DEG1: &str = "split operator of degree <= 1: GH iff the symbol has no zero on ZxR";
const THM_GROWTH: &str = "split operator of degree N > 1: no zeros plus |p(xi)+q(k)| >= C|xi|^(N-1)";
const THM_FIRST_T: &str = "first-order operator dt + (a+ib)dx + c";
const THM_FIRST_X: &str = "first-order operator dx + (a+ib)dt + c";
const THM_TUBE_CONST: &str = "tube operator with constant coefficients";
const THM_TUBE_REAL: &str = "tube operator with b = 0, reduced to dt + a0 dx + q0";
const THM_TUBE_SIGN: &str = "tube operator whose b changes sign";
const THM_TUBE_ONE_SIGN: &str = "tube operator whose b has one sign";
const THM_TUBE_AVG: &str = "tube operator whose averaged constant operator is not GH";

fn split_degree(op: &OperatorSpec) -> Option<(OperatorSpec, usize)> {
    let split = op.to_const_split()?;
    match &split {
        OperatorSpec::ConstSplit { p, .. } => {
            let d = p.degree().unwrap_or(0);
            Some((split, d))
        }
        _ => None,
    }
}

/// Split operators with `deg p ≤ 1`.
pub fn classify_const_deg_le1(op: &OperatorSpec, budgets: Budgets) -> Result<Classification> {
    let (split, deg) = split_degree(op).ok_or(Error::SymbolNotPointwise)?;
    if deg > 1 {
        return Err(Error::Precondition("deg p must be at most 1".into()));
    }
    let zeros = find_zeros(&split, budgets.k_budget)?;
    if let Some(w) = zeros.witnesses.first() {
        return Ok(Classification::new(
            Verdict::NotGh,
            THM_ZERO,
            Certificate::Witness { witness: *w },
            MuInterval::FROM_HALF,
        ));
    }
    if zeros.is_empty_and_exhaustive() {
        let gap = uniform_gap(&split, budgets.k_budget, 10.0)?;
        let values = BTreeMap::from([("uniform_gap".to_string(), gap)]);
        let cert = Certificate::Criterion { condition: "symbol has no zero on ZxR".into(), values, witness: None };
        return Ok(Classification::new(Verdict::Gh, THM_DEG1, cert, MuInterval::FROM_HALF));
    }
    Ok(Classification::new(
        Verdict::Undecided,
        THM_DEG1,
        Certificate::Partial { zeros, lower_bound: None },
        MuInterval::FROM_HALF,
    ))
}

fn criterion(condition: &str, values: &[(&str, f64)], witness: Option<ZeroWitness>) -> Certificate {
    Certificate::Criterion {
        condition: condition.to_string(),
        values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        witness,
    }
}

/// `∂t + (a + ib)∂x + c`.
pub fn classify_first_order_t(a: f64, b: f64, c: C64) -> Classification {
    let op = OperatorSpec::tube_const(a, b, c);
    let wit =
        |k: i64, xi: f64| ZeroWitness { k, xi, residual: op.symbol_at(k, xi).map(|s| s.norm()).unwrap_or(f64::NAN) };
    let base = [("a", a), ("b", b), ("re_c", c.re), ("im_c", c.im)];
    if b != 0.0 {
        let v = a / b * c.re + c.im;
        let (n, dist) = nearest_integer(v);
        let mut values = base.to_vec();
        values.push(("criterion_value", v));
        values.push(("distance_to_integer", dist));
        let cond = "(a/b) Re c + Im c not an integer";
        let mut out = if dist > INT_TOL {
            Classification::new(Verdict::Gh, THM_FIRST_T, criterion(cond, &values, None), MuInterval::FROM_HALF)
        } else {
            let w = wit(-n, c.re / b);
            Classification::new(Verdict::NotGh, THM_FIRST_T, criterion(cond, &values, Some(w)), MuInterval::FROM_HALF)
        };
        out.boundary_case = dist <= INT_TOL && dist > 0.0;
        return out;
    }
    if c.re != 0.0 {
        return Classification::new(
            Verdict::Gh,
            THM_FIRST_T,
            criterion("b = 0 and Re c != 0", &base, None),
            MuInterval::FROM_HALF,
        );
    }
    if a != 0.0 {
        let w = wit(0, -c.im / a);
        return Classification::new(
            Verdict::NotGh,
            THM_FIRST_T,
            criterion("b = 0, Re c = 0 and a != 0", &base, Some(w)),
            MuInterval::FROM_HALF,
        );
    }
    let (n, dist) = nearest_integer(c.im);
    let mut values = base.to_vec();
    values.push(("distance_to_integer", dist));
    let cond = "a = b = Re c = 0 and Im c not an integer";
    let mut out = if dist > INT_TOL {
        Classification::new(Verdict::Gh, THM_FIRST_T, criterion(cond, &values, None), MuInterval::FROM_HALF)
    } else {
        let w = wit(-n, 0.0);
        Classification::new(Verdict::NotGh, THM_FIRST_T, criterion(cond, &values, Some(w)), MuInterval::FROM_HALF)
    };
    out.boundary_case = dist <= INT_TOL && dist > 0.0;
    out
}

/// `∂x + (a + ib)∂t + c`. Its action on `e^{i(kt+ξx)}` is
/// `iξ + (a + ib)ik + c`, which vanishes iff `bk = Re c` and `ξ = −(ak + Im c)`.
pub fn classify_first_order_x(a: f64, b: f64, c: C64) -> Classification {
    let wit = |k: i64, xi: f64| {
        let m = I * xi + C64::new(a, b) * I * k as f64 + c;
        ZeroWitness { k, xi, residual: m.norm() }
    };
    let base = [("a", a), ("b", b), ("re_c", c.re), ("im_c", c.im)];
    if b != 0.0 {
        let v = c.re / b;
        let (n, dist) = nearest_integer(v);
        let mut values = base.to_vec();
        values.push(("criterion_value", v));
        values.push(("distance_to_integer", dist));
        let cond = "Re c / b not an integer";
        let mut out = if dist > INT_TOL {
            Classification::new(Verdict::Gh, THM_FIRST_X, criterion(cond, &values, None), MuInterval::FROM_HALF)
        } else {
            let w = wit(n, -(a * n as f64 + c.im));
            Classification::new(Verdict::NotGh, THM_FIRST_X, criterion(cond, &values, Some(w)), MuInterval::FROM_HALF)
        };
        out.boundary_case = dist <= INT_TOL && dist > 0.0;
        return out;
    }
    if c.re != 0.0 {
        Classification::new(
            Verdict::Gh,
            THM_FIRST_X,
            criterion("b = 0 and Re c != 0", &base, None),
            MuInterval::FROM_HALF,
        )
    } else {
        let w = wit(0, -c.im);
        Classification::new(
            Verdict::NotGh,
            THM_FIRST_X,
            criterion("b = 0 and Re c = 0", &base, Some(w)),
            MuInterval::FROM_HALF,
        )
    }
}

/// Split operators with `deg p > 1`.
pub fn classify_const_general(op: &OperatorSpec, budgets: Budgets) -> Result<Classification> {
    let (split, deg) = split_degree(op).ok_or(Error::SymbolNotPointwise)?;
    if deg <= 1 {
        return Err(Error::Precondition("deg p must exceed 1".into()));
    }
    let zeros = find_zeros(&split, budgets.k_budget)?;
    if let Some(w) = zeros.witnesses.first() {
        return Ok(Classification::new(
            Verdict::NotGh,
            THM_ZERO,
            Certificate::Witness { witness: *w },
            MuInterval::FROM_HALF,
        ));
    }
    let opts = LowerBoundOptions::new(budgets.r, budgets.k_budget, budgets.xi_samples);
    let lb = certify_lower_bound_with(&split, opts, Exec::default())?;
    match lb {
        LowerBound::Certificate(cert) if zeros.is_empty_and_exhaustive() => Ok(Classification::new(
            Verdict::Gh,
            THM_GROWTH,
            Certificate::LowerBound { lower_bound: cert, zeros },
            MuInterval::FROM_ONE,
        )),
        other => Ok(Classification::new(
            Verdict::Undecided,
            THM_GROWTH,
            Certificate::Partial { zeros, lower_bound: Some(other) },
            MuInterval::FROM_ONE,
        )),
    }
}

/// Dispatches any constant-coefficient operator to its decision procedure.
pub fn classify(op: &OperatorSpec, budgets: Budgets) -> Result<Classification> {
    match op {
        OperatorSpec::FirstOrderT { c1, c2, c3 } if *c2 == C64::new(1.0, 0.0) => {
            Ok(classify_first_order_t(c1.re, c1.im, *c3))
        }
        OperatorSpec::TubeT { a, b, q } => classify_tube(a, b, q, budgets),
        _ => match split_degree(op) {
            Some((_, d)) if d <= 1 => classify_const_deg_le1(op, budgets),
            Some(_) => classify_const_general(op, budgets),
            None => Err(Error::SymbolNotPointwise),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Nonnegative,
    Nonpositive,
    ChangesSign,
    IdenticallyZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignReport {
    pub class: SignClass,
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    pub argmax: f64,
}

/// Sign behaviour of a real trigonometric polynomial over one period.
pub fn sign_change(b: &TrigPolynomial) -> SignReport {
    if b.is_zero() {
        return SignReport { class: SignClass::IdenticallyZero, min: 0.0, argmin: 0.0, max: 0.0, argmax: 0.0 };
    }
    let n = 256usize.max(16 * b.max_frequency() as usize + 32);
    let h = std::f64::consts::TAU / n as f64;
    let f = |t: f64| b.eval(t).re;
    let vals: Vec<f64> = (0..n).map(|j| f(j as f64 * h)).collect();
    let (mut min, mut argmin, mut max, mut argmax) = (f64::INFINITY, 0.0, f64::NEG_INFINITY, 0.0);
    // Refine every discrete local extremum; the grid resolves all of them.
    for j in 0..n {
        let (l, r) = (vals[(j + n - 1) % n], vals[(j + 1) % n]);
        let t = j as f64 * h;
        if vals[j] <= l && vals[j] <= r {
            let (x, v) = golden_min(f, t - h, t + h, 80);
            if v < min {
                (min, argmin) = (v, x.rem_euclid(std::f64::consts::TAU));
            }
        }
        if vals[j] >= l && vals[j] >= r {
            let (x, v) = golden_min(|t| -f(t), t - h, t + h, 80);
            if -v > max {
                (max, argmax) = (-v, x.rem_euclid(std::f64::consts::TAU));
            }
        }
    }
    let tol = SIGN_TOL * min.abs().max(max.abs());
    let class = match (min < -tol, max > tol) {
        (true, true) => SignClass::ChangesSign,
        (true, false) => SignClass::Nonpositive,
        (false, true) => SignClass::Nonnegative,
        (false, false) => SignClass::IdenticallyZero,
    };
    SignReport { class, min, argmin, max, argmax }
}

/// Tube operator `∂t + (a(t) + i b(t))∂x + q(t)`; the notion is `F_μ`.
pub fn classify_tube(
    a: &TrigPolynomial,
    b: &TrigPolynomial,
    q: &TrigPolynomial,
    _budgets: Budgets,
) -> Result<Classification> {
    if !a.is_real_valued() || !b.is_real_valued() {
        return Err(Error::Precondition("tube coefficients a and b must be real-valued".into()));
    }
    let (a0, b0, q0) = (a.average().re, b.average().re, q.average());
    let tag = |mut c: Classification, theorem: &str| {
        c.theorem = theorem.to_string();
        c.notion = Notion::FMu;
        c.sigma_validity = "any sigma (loss of t-regularity allowed)".to_string();
        c
    };
    if a.is_constant() && b.is_constant() && q.is_constant() {
        return Ok(tag(classify_first_order_t(a0, b0, q0), THM_TUBE_CONST));
    }
    if b.is_zero() {
        return Ok(tag(classify_first_order_t(a0, 0.0, q0), THM_TUBE_REAL));
    }
    let averaged = classify_first_order_t(a0, b0, q0);
    if averaged.verdict == Verdict::NotGh {
        return Ok(tag(averaged, THM_TUBE_AVG));
    }
    let sign = sign_change(b);
    let mut values = vec![
        ("a0", a0),
        ("b0", b0),
        ("re_q0", q0.re),
        ("im_q0", q0.im),
        ("b_min", sign.min),
        ("b_argmin", sign.argmin),
        ("b_max", sign.max),
        ("b_argmax", sign.argmax),
    ];
    if sign.class == SignClass::ChangesSign {
        let cert = criterion("b does not change sign", &values, None);
        return Ok(tag(Classification::new(Verdict::NotGh, THM_TUBE_SIGN, cert, MuInterval::ABOVE_ONE), THM_TUBE_SIGN));
    }
    let v = a0 / b0 * q0.re + q0.im;
    let (_, dist) = nearest_integer(v);
    values.push(("criterion_value", v));
    values.push(("distance_to_integer", dist));
    let cert = criterion("b has one sign and (a0/b0) Re q0 + Im q0 not an integer", &values, None);
    let mut out =
        tag(Classification::new(Verdict::Gh, THM_TUBE_ONE_SIGN, cert, MuInterval::FROM_HALF), THM_TUBE_ONE_SIGN);
    out.boundary_case = averaged.boundary_case;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::ComplexPolynomial;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn first_order_t_cases() {
        assert_eq!(classify_first_order_t(1.0, 1.0, c(1.0, 0.5)).verdict, Verdict::Gh);
        let ng = classify_first_order_t(1.0, 1.0, c(1.0, 0.0));
        assert_eq!(ng.verdict, Verdict::NotGh);
        let w = ng.witness().unwrap();
        assert_eq!((w.k, w.xi), (-1, 1.0));
        assert!(w.residual < 1e-15);
        assert_eq!(classify_first_order_t(0.0, 0.0, c(0.0, 0.3)).verdict, Verdict::Gh);
        assert_eq!(classify_first_order_t(0.0, 0.0, c(0.0, 2.0)).verdict, Verdict::NotGh);
        assert_eq!(classify_first_order_t(2.0, 0.0, c(0.0, 0.3)).verdict, Verdict::NotGh);
    }

    #[test]
    fn first_order_x_cases() {
        let ng = classify_first_order_x(1.0, 2.0, c(4.0, 1.0));
        assert_eq!(ng.verdict, Verdict::NotGh);
        let w = ng.witness().unwrap();
        assert_eq!((w.k, w.xi), (2, -3.0));
        assert_eq!(w.residual, 0.0);
        assert_eq!(classify_first_order_x(1.0, 2.0, c(3.0, 1.0)).verdict, Verdict::Gh);
        let ng = classify_first_order_x(1.0, 0.0, c(0.0, 1.0));
        assert_eq!(ng.verdict, Verdict::NotGh);
        assert_eq!(ng.witness().unwrap().residual, 0.0);
    }

    #[test]
    fn boundary_flag() {
        let r = classify_first_order_t(0.0, 1.0, c(0.0, 2.0 + 1e-11));
        assert_eq!(r.verdict, Verdict::NotGh);
        assert!(r.boundary_case);
    }

    #[test]
    fn deg_le1_examples() {
        let op = OperatorSpec::const_split(
            ComplexPolynomial::new(vec![c(0.0, 1.0), c(1.0, 0.0)]),
            ComplexPolynomial::from_real(&[0.0, 0.0, 1.0]),
        );
        assert_eq!(classify(&op, Budgets::default()).unwrap().verdict, Verdict::Gh);
        let op = OperatorSpec::const_split(
            ComplexPolynomial::from_real(&[0.0, 1.0]),
            ComplexPolynomial::from_real(&[0.0, 1.0]),
        );
        let r = classify(&op, Budgets::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NotGh);
        let w = r.witness().unwrap();
        assert_eq!(w.xi + w.k as f64, 0.0);
        let op = OperatorSpec::const_split(
            ComplexPolynomial::from_real(&[5.0]),
            ComplexPolynomial::from_real(&[0.0, 0.0, -1.0]),
        );
        let r = classify(&op, Budgets::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Gh);
        match r.certificate {
            Certificate::Criterion { values, .. } => assert!((values["uniform_gap"] - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sign_classes() {
        let one = TrigPolynomial::real_constant(1.0);
        assert_eq!(sign_change(&one.add(&TrigPolynomial::cos(1.0))).class, SignClass::Nonnegative);
        assert_eq!(sign_change(&TrigPolynomial::cos(1.0)).class, SignClass::ChangesSign);
        assert_eq!(sign_change(&TrigPolynomial::zero()).class, SignClass::IdenticallyZero);
        let neg = one.add(&TrigPolynomial::cos(1.0)).scale(c(-1.0, 0.0));
        assert_eq!(sign_change(&neg).class, SignClass::Nonpositive);
    }

    #[test]
    fn tube_examples() {
        let one = TrigPolynomial::real_constant(1.0);
        let q = TrigPolynomial::constant(c(0.0, 0.3));
        let b = one.add(&TrigPolynomial::cos(1.0));
        let r = classify_tube(&TrigPolynomial::zero(), &b, &q, Budgets::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Gh);
        assert_eq!(r.notion, Notion::FMu);
        let r = classify_tube(&TrigPolynomial::zero(), &TrigPolynomial::cos(1.0), &q, Budgets::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NotGh);
        assert_eq!(r.mu_validity, MuInterval::ABOVE_ONE);
        let r = classify_tube(
            &TrigPolynomial::cos(1.0),
            &TrigPolynomial::zero(),
            &TrigPolynomial::real_constant(0.5),
            Budgets::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Gh);
    }

    #[test]
    fn mu_interval_text() {
        assert_eq!(MuInterval::FROM_HALF.to_string(), "[1/2,inf)");
        assert_eq!(MuInterval::ABOVE_ONE.to_string(), "(1,inf)");
        assert!(!MuInterval::ABOVE_ONE.contains(1.0));
    }
}
