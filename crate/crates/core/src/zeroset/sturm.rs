//! Certified real-root isolation by Sturm sequences.

use crate::symbols::RealPolynomial;

/// Relative size below which a remainder coefficient is treated as zero.
const REM_TRIM: f64 = 1e-12;

/// Remainder of `a / b`; `b` must be nonzero.
fn remainder(a: &RealPolynomial, b: &RealPolynomial) -> RealPolynomial {
    let mut r = a.coeffs().to_vec();
    let bc = b.coeffs();
    let db = bc.len() - 1;
    let lead = bc[db];
    let scale = a.max_abs_coeff().max(b.max_abs_coeff());
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let f = r[r.len() - 1] / lead;
        for (j, &c) in bc.iter().enumerate() {
            r[shift + j] -= f * c;
        }
        r.pop();
        while r.last().is_some_and(|c| c.abs() <= REM_TRIM * scale) {
            r.pop();
        }
    }
    for c in r.iter_mut() {
        if c.abs() <= REM_TRIM * scale {
            *c = 0.0;
        }
    }
    RealPolynomial::new(r)
}

/// `p₀ = p, p₁ = p', p_{i+1} = −rem(p_{i−1}, p_i)` until the remainder vanishes.
pub fn sturm_sequence(p: &RealPolynomial) -> Vec<RealPolynomial> {
    let mut seq = vec![p.clone()];
    if p.is_constant() {
        return seq;
    }
    seq.push(p.derivative());
    loop {
        let n = seq.len();
        let r = remainder(&seq[n - 2], &seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(RealPolynomial::new(r.coeffs().iter().map(|c| -c).collect()));
        if seq[seq.len() - 1].is_constant() {
            break;
        }
    }
    seq
}

/// Sign changes of the sequence at `x`, zeros skipped.
pub fn sign_variations(seq: &[RealPolynomial], x: f64) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(seq: &[RealPolynomial], a: f64, b: f64) -> usize {
    sign_variations(seq, a).saturating_sub(sign_variations(seq, b))
}

/// All distinct real roots of a nonconstant `p`, ascending.
///
/// Each returned value has been isolated to an interval containing exactly
/// one root and then polished by bisection on the Sturm count plus Newton.
pub fn real_roots(p: &RealPolynomial) -> Vec<f64> {
    if p.is_constant() {
        return Vec::new();
    }
    let seq = sturm_sequence(p);
    let bound = p.cauchy_bound() + 1.0;
    let mut out = Vec::new();
    isolate(p, &seq, -bound, bound, 0, &mut out);
    out
}

/// Midpoint nudged off exact roots, which would blind the sign count.
fn split_point(p: &RealPolynomial, a: f64, b: f64) -> f64 {
    let mut m = 0.5 * (a + b);
    if p.eval(m) == 0.0 {
        m = a + 0.538_196_6 * (b - a);
    }
    m
}

fn isolate(p: &RealPolynomial, seq: &[RealPolynomial], a: f64, b: f64, depth: u32, out: &mut Vec<f64>) {
    let n = count_roots(seq, a, b);
    if n == 0 {
        return;
    }
    let width_floor = 1e-14 * (1.0 + a.abs().max(b.abs()));
    if n == 1 {
        out.push(refine(p, seq, a, b));
        return;
    }
    if b - a <= width_floor || depth > 200 {
        // A cluster closer than floating resolution counts as one root.
        out.push(0.5 * (a + b));
        return;
    }
    let m = split_point(p, a, b);
    isolate(p, seq, a, m, depth + 1, out);
    isolate(p, seq, m, b, depth + 1, out);
}

fn refine(p: &RealPolynomial, seq: &[RealPolynomial], mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        if b - a <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if count_roots(seq, a, m) == 1 {
            b = m;
        } else {
            a = m;
        }
    }
    newton_polish(p, 0.5 * (a + b))
}

/// A few Newton steps, kept only while they reduce |p|.
pub fn newton_polish(p: &RealPolynomial, mut x: f64) -> f64 {
    let dp = p.derivative();
    for _ in 0..8 {
        let fx = p.eval(x);
        let d = dp.eval(x);
        if fx == 0.0 || d == 0.0 || !d.is_finite() {
            break;
        }
        let nx = x - fx / d;
        if !nx.is_finite() || p.eval(nx).abs() >= fx.abs() {
            break;
        }
        x = nx;
    }
    x
}
