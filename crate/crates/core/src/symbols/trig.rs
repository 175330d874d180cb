use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{C64, I};

/// Finite Fourier series `Σ c_n e^{int}` on the circle.
///
/// Exact-zero amplitudes are never stored, so two polynomials with the same
/// values compare equal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "Vec<TrigTerm>", from = "Vec<TrigTerm>")]
pub struct TrigPolynomial {
    coeffs: BTreeMap<i64, C64>,
}

/// One `{n, re, im}` record of the serialized form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub n: i64,
    pub re: f64,
    pub im: f64,
}

impl TrigPolynomial {
    pub fn new(coeffs: impl IntoIterator<Item = (i64, C64)>) -> Self {
        let mut map = BTreeMap::new();
        for (n, c) in coeffs {
            *map.entry(n).or_insert(C64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != C64::new(0.0, 0.0));
        Self { coeffs: map }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::new([(0, c)])
    }

    pub fn real_constant(c: f64) -> Self {
        Self::constant(C64::new(c, 0.0))
    }

    /// `amp·cos t`.
    pub fn cos(amp: f64) -> Self {
        Self::new([(-1, C64::new(amp / 2.0, 0.0)), (1, C64::new(amp / 2.0, 0.0))])
    }

    /// `amp·sin t`.
    pub fn sin(amp: f64) -> Self {
        Self::new([(-1, C64::new(0.0, amp / 2.0)), (1, C64::new(0.0, -amp / 2.0))])
    }

    pub fn coeff(&self, n: i64) -> C64 {
        self.coeffs.get(&n).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    /// Largest |n| with a nonzero amplitude; 0 for constants and zero.
    pub fn max_frequency(&self) -> i64 {
        self.coeffs.keys().map(|n| n.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&n| n == 0)
    }

    /// Exact conjugate symmetry `c_{-n} = conj(c_n)`.
    pub fn is_real_valued(&self) -> bool {
        self.coeffs.iter().all(|(&n, c)| self.coeff(-n) == c.conj())
    }

    /// Mean over one period, i.e. `c_0`.
    pub fn average(&self) -> C64 {
        self.coeff(0)
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.coeffs.iter().map(|(&n, &c)| c * C64::from_polar(1.0, n as f64 * t)).sum()
    }

    /// Value of the `order`-th derivative at `t`.
    pub fn eval_deriv(&self, order: u32, t: f64) -> C64 {
        self.coeffs.iter().map(|(&n, &c)| c * (I * n as f64).powu(order) * C64::from_polar(1.0, n as f64 * t)).sum()
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.terms().map(|(n, c)| (n, c * I * n as f64)))
    }

    /// Periodic primitive `F` with `F(0) = 0` and `F' = f - average(f)`,
    /// returned together with the removed linear slope `average(f)`.
    pub fn zero_mean_antiderivative(&self) -> (Self, C64) {
        let mut out: Vec<(i64, C64)> = self
            .terms()
            .filter(|&(n, _)| n != 0)
            .map(|(n, c)| (n, C64::new(c.im / n as f64, -c.re / n as f64)))
            .collect();
        // Summing ±n pairs keeps F_0 exactly real for real-valued input.
        let lookup: BTreeMap<i64, C64> = out.iter().copied().collect();
        let mut f0 = C64::new(0.0, 0.0);
        for (&n, &c) in lookup.range(1..) {
            f0 -= c + lookup.get(&-n).copied().unwrap_or_default();
        }
        for (&n, &c) in lookup.range(..0) {
            if !lookup.contains_key(&-n) {
                f0 -= c;
            }
        }
        out.push((0, f0));
        (Self::new(out), self.average())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.terms().map(|(n, c)| (n, c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.terms().chain(other.terms()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut prod = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (n, c) in self.terms() {
            for (m, d) in other.terms() {
                prod.push((n + m, c * d));
            }
        }
        Self::new(prod)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(C64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    /// `Σ |c_n|`, an upper bound for the sup norm.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn real_part(&self) -> Self {
        let conj = Self::new(self.terms().map(|(n, c)| (-n, c.conj())));
        self.add(&conj).scale(C64::new(0.5, 0.0))
    }

    pub fn imag_part(&self) -> Self {
        let conj = Self::new(self.terms().map(|(n, c)| (-n, c.conj())));
        self.add(&conj.scale(C64::new(-1.0, 0.0))).scale(C64::new(0.0, -0.5))
    }
}

impl From<TrigPolynomial> for Vec<TrigTerm> {
    fn from(p: TrigPolynomial) -> Self {
        p.terms().map(|(n, c)| TrigTerm { n, re: c.re, im: c.im }).collect()
    }
}

impl From<Vec<TrigTerm>> for TrigPolynomial {
    fn from(v: Vec<TrigTerm>) -> Self {
        Self::new(v.into_iter().map(|t| (t.n, C64::new(t.re, t.im))))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn averages() {
        assert_eq!(TrigPolynomial::cos(1.0).average(), C64::new(0.0, 0.0));
        let b = TrigPolynomial::real_constant(1.0).add(&TrigPolynomial::cos(1.0));
        assert_eq!(b.average(), C64::new(1.0, 0.0));
        assert_eq!(TrigPolynomial::constant(C64::new(0.0, 0.3)).average(), C64::new(0.0, 0.3));
    }

    #[test]
    fn antiderivative_of_cos_is_sin() {
        let (a, slope) = TrigPolynomial::cos(1.0).zero_mean_antiderivative();
        assert_eq!(slope, C64::new(0.0, 0.0));
        for j in 0..16 {
            let t = j as f64 * 0.4;
            assert!(close(a.eval(t), C64::new(t.sin(), 0.0), 1e-15));
        }
        let b = TrigPolynomial::real_constant(1.0).add(&TrigPolynomial::cos(1.0));
        let (bb, slope) = b.zero_mean_antiderivative();
        assert_eq!(slope, C64::new(1.0, 0.0));
        assert_eq!(bb, a);
    }

    #[test]
    fn antiderivative_of_constant_vanishes() {
        let (q, slope) = TrigPolynomial::constant(C64::new(2.0, -1.0)).zero_mean_antiderivative();
        assert!(q.is_zero());
        assert_eq!(slope, C64::new(2.0, -1.0));
    }

    #[test]
    fn antiderivative_starts_at_zero_for_one_sided_spectrum() {
        let f = TrigPolynomial::new([(2, C64::new(1.0, 0.5)), (3, C64::new(0.0, -2.0))]);
        let (a, _) = f.zero_mean_antiderivative();
        assert!(a.eval(0.0).norm() < 1e-15);
    }

    #[test]
    fn derivative_values() {
        let c = TrigPolynomial::cos(1.0);
        assert!(close(c.eval(0.0), C64::new(1.0, 0.0), 1e-15));
        assert!(close(c.eval_deriv(1, FRAC_PI_2), C64::new(-1.0, 0.0), 1e-15));
        let e = TrigPolynomial::new([(1, C64::new(1.0, 0.0))]);
        assert!(close(e.eval_deriv(2, 0.0), C64::new(-1.0, 0.0), 1e-15));
        assert!(close(e.eval(PI), C64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn realness_flag() {
        assert!(TrigPolynomial::cos(2.0).is_real_valued());
        assert!(TrigPolynomial::sin(2.0).is_real_valued());
        assert!(!TrigPolynomial::constant(C64::new(0.0, 0.3)).is_real_valued());
        assert!(!TrigPolynomial::new([(1, C64::new(1.0, 0.0))]).is_real_valued());
    }

    #[test]
    fn products_and_parts() {
        let c = TrigPolynomial::cos(1.0);
        // cos² = 1/2 + cos(2t)/2
        let c2 = c.pow(2);
        assert_eq!(c2.average(), C64::new(0.5, 0.0));
        let mixed = c.add(&TrigPolynomial::sin(1.0).scale(I));
        assert_eq!(mixed.real_part(), c);
        assert!(close(mixed.imag_part().eval(0.3), C64::new(0.3f64.sin(), 0.0), 1e-15));
    }

    #[test]
    fn serde_records_roundtrip() {
        let f = TrigPolynomial::cos(1.0).add(&TrigPolynomial::constant(C64::new(0.0, 0.3)));
        let v: Vec<TrigTerm> = f.clone().into();
        assert_eq!(TrigPolynomial::from(v), f);
    }
}
