//! Zeros of the symbol on `Z × R` and the growth bound away from them.

mod sturm;

use serde::Serialize;

pub use sturm::{count_roots, real_roots, sign_variations, sturm_sequence};

use crate::exec::Exec;
use crate::numeric::{fit_line, golden_min, linspace, logspace};
use crate::symbols::{ComplexPolynomial, OperatorSpec, RealPolynomial, C64, I};
use crate::{Error, Result};

/// Acceptance threshold for the imaginary part at a real-part root,
/// relative to `1 + |p(ξ)|`.
pub const ZERO_TOL: f64 = 1e-10;

/// A point of the lattice-by-line where the symbol vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroWitness {
    pub k: i64,
    pub xi: f64,
    /// `|symbol|` at the witness.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    /// Every zero has been found, or the witness list represents a
    /// characterized infinite family.
    Exhaustive,
    /// Only `|k| ≤ k_budget` was searched.
    BudgetLimited,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSearch {
    pub witnesses: Vec<ZeroWitness>,
    pub completeness: Completeness,
    pub k_budget: i64,
    /// The zero set is infinite; witnesses are listed for `|k| ≤ k_budget`.
    pub infinite_family: bool,
}

impl ZeroSearch {
    pub fn is_empty_and_exhaustive(&self) -> bool {
        self.witnesses.is_empty() && self.completeness == Completeness::Exhaustive
    }

    fn new(mut witnesses: Vec<ZeroWitness>, completeness: Completeness, k_budget: i64) -> Self {
        witnesses.sort_by(|a, b| a.k.cmp(&b.k).then(a.xi.total_cmp(&b.xi)));
        witnesses.dedup_by(|a, b| a.k == b.k && (a.xi - b.xi).abs() <= 1e-9 * (1.0 + a.xi.abs()));
        Self { witnesses, completeness, k_budget, infinite_family: false }
    }

    fn infinite(witnesses: Vec<ZeroWitness>, k_budget: i64) -> Self {
        Self { infinite_family: true, ..Self::new(witnesses, Completeness::Exhaustive, k_budget) }
    }
}

/// All zeros of the symbol of a constant-coefficient operator.
pub fn find_zeros(op: &OperatorSpec, k_budget: i64) -> Result<ZeroSearch> {
    find_zeros_with(op, k_budget, Exec::default())
}

pub fn find_zeros_with(op: &OperatorSpec, k_budget: i64, exec: Exec) -> Result<ZeroSearch> {
    let k_budget = k_budget.max(0);
    match op {
        OperatorSpec::ConstSplit { p, q } => split_zeros(op, p, q, k_budget, exec),
        OperatorSpec::FirstOrderT { c1, c2, c3 } => first_order_zeros(op, *c1, *c2, *c3, k_budget),
        OperatorSpec::TubeT { .. } => match op.tube_as_first_order() {
            Some(fo) => find_zeros_with(&fo, k_budget, exec),
            None => Err(Error::SymbolNotPointwise),
        },
    }
}

fn witness(op: &OperatorSpec, k: i64, xi: f64) -> ZeroWitness {
    let residual = op.symbol_at(k, xi).map(|s| s.norm()).unwrap_or(f64::INFINITY);
    ZeroWitness { k, xi, residual }
}

fn budget_range(k_budget: i64) -> impl Iterator<Item = i64> {
    -k_budget..=k_budget
}

/// Closed-form zeros of `c₁ξ + c₂k − ic₃`.
///
/// Real and imaginary parts give the 2×2 real system
/// `Re c₁ ξ + Re c₂ k = −Im c₃`, `Im c₁ ξ + Im c₂ k = Re c₃`.
fn first_order_zeros(op: &OperatorSpec, c1: C64, c2: C64, c3: C64, k_budget: i64) -> Result<ZeroSearch> {
    let scale = c1.norm().max(c2.norm()).max(c3.norm());
    if scale == 0.0 {
        return Err(Error::DegenerateOperator);
    }
    let tiny = 1e-14 * scale;
    let (a11, a12, a21, a22) = (c1.re, c2.re, c1.im, c2.im);
    let (r1, r2) = (-c3.im, c3.re);
    let det = a11 * a22 - a12 * a21;
    if det.abs() > 1e-13 * c1.norm() * c2.norm() && c1.norm() > tiny && c2.norm() > tiny {
        let k = (a11 * r2 - a21 * r1) / det;
        let (kr, dist) = crate::numeric::nearest_integer(k);
        if dist > crate::classifier::INT_TOL * (1.0 + k.abs()) {
            return Ok(ZeroSearch::new(Vec::new(), Completeness::Exhaustive, k_budget));
        }
        // Least-squares ξ for the rounded k keeps the residual minimal.
        let w = c2 * kr as f64 - I * c3;
        let xi = -(c1.conj() * w).re / c1.norm_sqr();
        return Ok(ZeroSearch::new(vec![witness(op, kr, xi)], Completeness::Exhaustive, k_budget));
    }
    if c1.norm() <= tiny && c2.norm() <= tiny {
        // Symbol is the nonzero constant −ic₃.
        return Ok(ZeroSearch::new(Vec::new(), Completeness::Exhaustive, k_budget));
    }
    if c1.norm() > tiny {
        // c₂ = λc₁ with λ real: c₁(ξ + λk) = ic₃.
        let lambda = (c2 / c1).re;
        let target = I * c3 / c1;
        if target.im.abs() > tiny / c1.norm() {
            return Ok(ZeroSearch::new(Vec::new(), Completeness::Exhaustive, k_budget));
        }
        let ws = budget_range(k_budget).map(|k| witness(op, k, target.re - lambda * k as f64)).collect();
        return Ok(ZeroSearch::infinite(ws, k_budget));
    }
    // c₁ = 0: the symbol does not depend on ξ.
    let k = I * c3 / c2;
    let (kr, dist) = crate::numeric::nearest_integer(k.re);
    if k.im.abs() > tiny / c2.norm() || dist > crate::classifier::INT_TOL * (1.0 + k.re.abs()) {
        return Ok(ZeroSearch::new(Vec::new(), Completeness::Exhaustive, k_budget));
    }
    Ok(ZeroSearch::infinite(vec![witness(op, kr, 0.0)], k_budget))
}

/// Integer roots of a real polynomial.
enum IntegerRoots {
    All,
    Finite(Vec<i64>),
}

fn integer_roots(r: &RealPolynomial) -> IntegerRoots {
    if r.is_zero() {
        return IntegerRoots::All;
    }
    if r.is_constant() {
        return IntegerRoots::Finite(Vec::new());
    }
    let mut ks: Vec<i64> = Vec::new();
    for x in real_roots(r) {
        for cand in [x.floor(), x.ceil()] {
            if !cand.is_finite() || cand.abs() > 9e15 {
                continue;
            }
            if r.eval(cand).abs() <= crate::classifier::INT_TOL * (1.0 + r.abs_scale(cand)) {
                ks.push(cand as i64);
            }
        }
    }
    ks.sort_unstable();
    ks.dedup();
    IntegerRoots::Finite(ks)
}

fn common_integer_roots(a: &RealPolynomial, b: &RealPolynomial, k_budget: i64) -> (Vec<i64>, bool) {
    match (integer_roots(a), integer_roots(b)) {
        (IntegerRoots::All, IntegerRoots::All) => (budget_range(k_budget).collect(), true),
        (IntegerRoots::All, IntegerRoots::Finite(v)) | (IntegerRoots::Finite(v), IntegerRoots::All) => (v, false),
        (IntegerRoots::Finite(u), IntegerRoots::Finite(v)) => {
            (u.into_iter().filter(|k| v.contains(k)).collect(), false)
        }
    }
}

fn split_zeros(
    op: &OperatorSpec,
    p: &ComplexPolynomial,
    q: &ComplexPolynomial,
    k_budget: i64,
    exec: Exec,
) -> Result<ZeroSearch> {
    match p.degree() {
        None | Some(0) => {
            // Symbol c + q(k) does not depend on ξ.
            let c = p.coeffs().first().copied().unwrap_or_default();
            let s = q.add_constant(c);
            if s.is_zero() {
                return Err(Error::DegenerateOperator);
            }
            let (ks, all) = common_integer_roots(&s.real_part(), &s.imag_part(), k_budget);
            let ws: Vec<ZeroWitness> = ks.into_iter().map(|k| witness(op, k, 0.0)).collect();
            // Each zero k carries the whole ξ-line.
            let infinite_family = all || !ws.is_empty();
            Ok(ZeroSearch { infinite_family, ..ZeroSearch::new(ws, Completeness::Exhaustive, k_budget) })
        }
        Some(1) => {
            // αξ + β + q(k) = 0 forces ξ = −s(k) with s = (β + q)/α real.
            let (beta, alpha) = (p.coeffs()[0], p.coeffs()[1]);
            let s = q.add_constant(beta).scale(alpha.inv());
            let xi_of = |k: i64| -s.eval(k as f64).re;
            match integer_roots(&s.imag_part()) {
                IntegerRoots::All => {
                    let ws = budget_range(k_budget).map(|k| witness(op, k, xi_of(k))).collect();
                    Ok(ZeroSearch::infinite(ws, k_budget))
                }
                IntegerRoots::Finite(ks) => {
                    let ws = ks.into_iter().map(|k| witness(op, k, xi_of(k))).collect();
                    Ok(ZeroSearch::new(ws, Completeness::Exhaustive, k_budget))
                }
            }
        }
        Some(_) => higher_order_zeros(op, p, q, k_budget, exec),
    }
}

/// Lattice values of `k` that can carry a zero, when a finite set can be
/// derived a priori.
fn candidate_ks(p: &ComplexPolynomial, q: &ComplexPolynomial) -> Option<Vec<i64>> {
    let parts = [(p.imag_part(), q.imag_part()), (p.real_part(), q.real_part())];
    for (pp, qq) in &parts {
        if !pp.is_constant() {
            continue;
        }
        let c = pp.constant_term();
        if !qq.is_constant() {
            if let IntegerRoots::Finite(ks) = integer_roots(&qq.add_constant(c)) {
                return Some(ks);
            }
        } else if qq.constant_term() + c != 0.0 {
            return Some(Vec::new());
        }
    }
    None
}

fn higher_order_zeros(
    op: &OperatorSpec,
    p: &ComplexPolynomial,
    q: &ComplexPolynomial,
    k_budget: i64,
    exec: Exec,
) -> Result<ZeroSearch> {
    let (ks, completeness) = match candidate_ks(p, q) {
        Some(ks) => (ks, Completeness::Exhaustive),
        None => (budget_range(k_budget).collect(), Completeness::BudgetLimited),
    };
    let per_k = exec.map_range(ks.len(), |i| {
        let k = ks[i];
        zeros_at_fixed_k(p, q.eval(k as f64)).into_iter().map(|xi| witness(op, k, xi)).collect::<Vec<_>>()
    });
    Ok(ZeroSearch::new(per_k.into_iter().flatten().collect(), completeness, k_budget))
}

/// Real ξ with `p(ξ) + w = 0`.
fn zeros_at_fixed_k(p: &ComplexPolynomial, w: C64) -> Vec<f64> {
    let re = p.real_part().add_constant(w.re);
    let im = p.imag_part().add_constant(w.im);
    match (re.is_zero(), im.is_zero()) {
        (true, true) => vec![0.0],
        (true, false) => real_roots(&im),
        _ => real_roots(&re)
            .into_iter()
            .filter(|&xi| im.eval(xi).abs() <= ZERO_TOL * (1.0 + p.eval(xi).norm()))
            .collect(),
    }
}

/// Sampled evidence for `|p(ξ) + q(k)| ≥ C|ξ|^{N−1}` on `|ξ| ≥ R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundCertificate {
    pub c: f64,
    pub r: f64,
    pub r_max: f64,
    pub k_range: i64,
    pub xi_samples: usize,
    /// Smallest sampled value of `|p(ξ)+q(k)| / |ξ|^{N−1}`.
    pub grid_inf: f64,
    pub label: &'static str,
}

/// Per-`|k|` minimizer of the normalized symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    pub k: i64,
    pub xi: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LowerBound {
    Certificate(LowerBoundCertificate),
    /// The sampled infimum tends to zero along `path`.
    Refuted {
        path: Vec<PathPoint>,
        log_log_slope: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundOptions {
    pub r: f64,
    pub r_max: f64,
    pub k_budget: i64,
    pub xi_samples: usize,
}

impl LowerBoundOptions {
    pub fn new(r: f64, k_budget: i64, xi_samples: usize) -> Self {
        Self { r, r_max: 1e3 * r, k_budget, xi_samples }
    }
}

pub fn certify_lower_bound(op: &OperatorSpec, r: f64, k_budget: i64, xi_samples: usize) -> Result<LowerBound> {
    certify_lower_bound_with(op, LowerBoundOptions::new(r, k_budget, xi_samples), Exec::default())
}

pub fn certify_lower_bound_with(op: &OperatorSpec, opts: LowerBoundOptions, exec: Exec) -> Result<LowerBound> {
    let OperatorSpec::ConstSplit { p, q } = op else {
        return Err(Error::Precondition("growth bound applies to split operators".into()));
    };
    let n = match p.degree() {
        Some(n) if n > 1 => n,
        _ => return Err(Error::Precondition("growth bound requires deg p > 1".into())),
    };
    if !(opts.r > 0.0 && opts.r_max > opts.r && opts.xi_samples >= 2) {
        return Err(Error::Precondition("need 0 < R < R_max and at least 2 samples".into()));
    }
    let k_budget = opts.k_budget.max(0);
    let xs = logspace(opts.r, opts.r_max, opts.xi_samples);
    let per_k = exec.map_range((2 * k_budget + 1) as usize, |i| {
        let k = i as i64 - k_budget;
        let qk = q.eval(k as f64);
        let ratio = |xi: f64| (p.eval(xi) + qk).norm() / xi.abs().powi(n as i32 - 1);
        let mut best = PathPoint { k, xi: xs[0], ratio: f64::INFINITY };
        for sign in [1.0, -1.0] {
            let vals: Vec<f64> = xs.iter().map(|&x| ratio(sign * x)).collect();
            let j = (0..vals.len()).fold(0, |b, j| if vals[j] < vals[b] { j } else { b });
            let lo = xs[j.saturating_sub(1)];
            let hi = xs[(j + 1).min(xs.len() - 1)];
            let (x, v) = golden_min(|x| ratio(sign * x), lo, hi, 100);
            let (x, v) = if v < vals[j] { (x, v) } else { (xs[j], vals[j]) };
            if v < best.ratio {
                best = PathPoint { k, xi: sign * x, ratio: v };
            }
        }
        best
    });
    let grid_inf = per_k.iter().map(|pt| pt.ratio).fold(f64::INFINITY, f64::min);

    // Fold ±k into one profile over |k|.
    let mut by_abs: Vec<PathPoint> = (0..=k_budget)
        .map(|a| {
            let i_pos = (k_budget + a) as usize;
            let i_neg = (k_budget - a) as usize;
            if per_k[i_neg].ratio < per_k[i_pos].ratio {
                per_k[i_neg]
            } else {
                per_k[i_pos]
            }
        })
        .collect();
    let outer: Vec<&PathPoint> =
        by_abs.iter().filter(|pt| pt.k != 0 && 2 * pt.k.abs() >= k_budget && pt.ratio > 0.0).collect();
    let slope = if outer.len() >= 3 {
        let x: Vec<f64> = outer.iter().map(|pt| (pt.k.abs() as f64).ln()).collect();
        let y: Vec<f64> = outer.iter().map(|pt| pt.ratio.ln()).collect();
        fit_line(&x, &y).1
    } else {
        0.0
    };
    if grid_inf <= 1e-12 || slope < -0.5 {
        by_abs.retain(|pt| pt.k != 0);
        return Ok(LowerBound::Refuted { path: by_abs, log_log_slope: slope });
    }
    Ok(LowerBound::Certificate(LowerBoundCertificate {
        c: grid_inf,
        r: opts.r,
        r_max: opts.r_max,
        k_range: k_budget,
        xi_samples: opts.xi_samples,
        grid_inf,
        label: "sampled",
    }))
}

/// Sampled `inf |symbol|` over `|k| ≤ k_budget`, `|ξ| ≤ xi_max`.
pub fn uniform_gap(op: &OperatorSpec, k_budget: i64, xi_max: f64) -> Result<f64> {
    let k_budget = k_budget.max(0);
    op.symbol_at(0, 0.0)?;
    let xs = linspace(-xi_max, xi_max, 4001);
    let mins = Exec::default().map_range((2 * k_budget + 1) as usize, |i| {
        let k = i as i64 - k_budget;
        let f = |xi: f64| op.symbol_at(k, xi).map(|s| s.norm()).unwrap_or(f64::INFINITY);
        let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let j = (0..vals.len()).fold(0, |b, j| if vals[j] < vals[b] { j } else { b });
        let lo = xs[j.saturating_sub(1)];
        let hi = xs[(j + 1).min(xs.len() - 1)];
        golden_min(f, lo, hi, 100).1.min(vals[j])
    });
    Ok(mins.into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn split(p: &[C64], q: &[C64]) -> OperatorSpec {
        OperatorSpec::const_split(ComplexPolynomial::new(p.to_vec()), ComplexPolynomial::new(q.to_vec()))
    }

    #[test]
    fn first_order_witness() {
        let op = OperatorSpec::tube_const(1.0, 1.0, c(1.0, 0.0));
        let z = find_zeros(&op, 10).unwrap();
        assert_eq!(z.completeness, Completeness::Exhaustive);
        assert_eq!(z.witnesses.len(), 1);
        assert_eq!(z.witnesses[0].k, -1);
        assert!((z.witnesses[0].xi - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parabola_zeros_include_perfect_squares() {
        let op = split(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(-1.0, 0.0)]);
        let z = find_zeros(&op, 10).unwrap();
        assert_eq!(z.completeness, Completeness::BudgetLimited);
        for (k, xi) in [(0, 0.0), (1, 1.0), (1, -1.0), (4, 2.0), (4, -2.0), (9, 3.0), (9, -3.0)] {
            assert!(z.witnesses.iter().any(|w| w.k == k && (w.xi - xi).abs() < 1e-7), "missing ({k}, {xi})");
        }
        for w in &z.witnesses {
            assert!((w.xi * w.xi - w.k as f64).abs() < 1e-7);
            assert!(w.residual <= 1e-8);
        }
    }

    #[test]
    fn shifted_line_has_no_zeros() {
        let op = split(&[c(0.0, 1.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let z = find_zeros(&op, 10).unwrap();
        assert!(z.is_empty_and_exhaustive());
    }

    #[test]
    fn degenerate_symbol_is_rejected() {
        let op = split(&[c(2.0, 0.0)], &[c(-2.0, 0.0)]);
        assert!(matches!(find_zeros(&op, 3), Err(Error::DegenerateOperator)));
        let op = OperatorSpec::first_order_t(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(find_zeros(&op, 3), Err(Error::DegenerateOperator)));
    }

    #[test]
    fn proper_real_part_bounds_candidates() {
        // −iξ³ − iξ² + c − k²
        let family = |cst: f64| {
            split(&[c(cst, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(0.0, -1.0)], &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
        };
        assert!(find_zeros(&family(0.5), 5).unwrap().is_empty_and_exhaustive());
        let z = find_zeros(&family(1.0), 5).unwrap();
        assert_eq!(z.completeness, Completeness::Exhaustive);
        let pts: Vec<(i64, i64)> = z.witnesses.iter().map(|w| (w.k, w.xi.round() as i64)).collect();
        assert_eq!(pts, [(-1, -1), (-1, 0), (1, -1), (1, 0)]);
    }

    #[test]
    fn constant_p_uses_integer_roots() {
        // 5 − k² has no integer root
        let op = split(&[c(5.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(find_zeros(&op, 10).unwrap().is_empty_and_exhaustive());
        let op = split(&[c(4.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let ks: Vec<i64> = find_zeros(&op, 10).unwrap().witnesses.iter().map(|w| w.k).collect();
        assert_eq!(ks, [-2, 2]);
    }

    #[test]
    fn growth_bound_certificate_for_cubic() {
        let op = split(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(0.0, 1.0)]);
        match certify_lower_bound(&op, 2.0, 20, 200).unwrap() {
            LowerBound::Certificate(cert) => {
                assert!(cert.c >= 2.0 - 1e-9 && cert.c < 2.5, "{}", cert.c);
                assert_eq!(cert.label, "sampled");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn growth_bound_refuted_along_hyperbola() {
        // −iξ² + ξ + i + ik² − k tends to zero along ξ = √(k²+1)
        let op = split(&[c(0.0, 1.0), c(1.0, 0.0), c(0.0, -1.0)], &[c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)]);
        match certify_lower_bound(&op, 1.0, 40, 400).unwrap() {
            LowerBound::Refuted { path, log_log_slope } => {
                assert!(log_log_slope < -1.5, "{log_log_slope}");
                let last = path.last().unwrap();
                let k = last.k as f64;
                assert!((last.xi.abs() - (k * k + 1.0).sqrt()).abs() < 1e-2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degree_one_is_a_precondition_error() {
        let op = split(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)]);
        assert!(matches!(certify_lower_bound(&op, 1.0, 3, 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn gaps() {
        let op = OperatorSpec::first_order_t(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        assert!((uniform_gap(&op, 10, 10.0).unwrap() - 1.0).abs() < 1e-9);
        let op = split(&[c(0.0, 1.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((uniform_gap(&op, 10, 10.0).unwrap() - 1.0).abs() < 1e-9);
        let op = split(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((uniform_gap(&op, 10, 10.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
