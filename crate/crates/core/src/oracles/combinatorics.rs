use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::symbols::{TrigPolynomial, C64};
use crate::{Error, Result};

/// `τ = (τ₁, …, τ_N)` with `Σ j·τ_j = N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PartitionMultiIndex {
    pub n: usize,
    pub tau: Vec<u32>,
}

impl PartitionMultiIndex {
    pub fn new(tau: Vec<u32>) -> Result<Self> {
        let n = tau.len();
        let weight: usize = tau.iter().enumerate().map(|(j, &t)| (j + 1) * t as usize).sum();
        if n == 0 || weight != n {
            return Err(Error::Precondition(format!("{tau:?} has weight {weight}, expected {n}")));
        }
        Ok(Self { n, tau })
    }

    /// `|τ| = Σ τ_j`.
    pub fn order(&self) -> u32 {
        self.tau.iter().sum()
    }
}

/// All of `Δ(N)` in descending lexicographic order.
pub fn enumerate_delta(n: usize) -> Vec<PartitionMultiIndex> {
    fn go(n: usize, j: usize, rest: usize, cur: &mut Vec<u32>, out: &mut Vec<PartitionMultiIndex>) {
        if j > n {
            if rest == 0 {
                out.push(PartitionMultiIndex { n, tau: cur.clone() });
            }
            return;
        }
        for t in (0..=rest / j).rev() {
            cur.push(t as u32);
            go(n, j + 1, rest - j * t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, 1, n, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

pub(crate) fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn factorial_f64(n: u64) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

fn factorial_big(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `∂ᴺ e^{f(t)}` through the sum over `Δ(N)`, with exact derivatives of `f`.
pub fn faa_di_bruno_exp(f: &TrigPolynomial, n: usize, t: f64) -> C64 {
    let ef = f.eval(t).exp();
    if n == 0 {
        return ef;
    }
    let scaled: Vec<C64> = (1..=n).map(|l| f.eval_deriv(l as u32, t) / factorial_f64(l as u64)).collect();
    let nf = factorial_f64(n as u64);
    let sum: C64 = enumerate_delta(n)
        .iter()
        .map(|idx| {
            let denom: f64 = idx.tau.iter().map(|&t| factorial_f64(u64::from(t))).product();
            let prod: C64 = idx.tau.iter().zip(&scaled).map(|(&t, d)| d.powu(t)).product();
            prod * (nf / denom)
        })
        .sum();
    ef * sum
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaIdentity {
    pub n: usize,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub equal: bool,
    /// Rational arithmetic was used; `lhs_exact`/`rhs_exact` hold `p/q`.
    pub exact: bool,
    pub lhs_exact: Option<String>,
    pub rhs_exact: Option<String>,
}

/// `Σ_{Δ(N)} |τ|!/τ! · R^{|τ|}` against `R(1+R)^{N−1}` in floating point.
pub fn check_delta_identity(n: usize, r: f64) -> DeltaIdentity {
    let lhs: f64 = enumerate_delta(n)
        .iter()
        .map(|idx| {
            let k = idx.order();
            let multi =
                factorial_f64(u64::from(k)) / idx.tau.iter().map(|&t| factorial_f64(u64::from(t))).product::<f64>();
            multi * r.powi(k as i32)
        })
        .sum();
    let rhs = r * (1.0 + r).powi(n as i32 - 1);
    DeltaIdentity { n, r, lhs, rhs, equal: (lhs - rhs).abs() < 1e-9, exact: false, lhs_exact: None, rhs_exact: None }
}

/// The same identity in exact rational arithmetic.
pub fn check_delta_identity_exact(n: usize, r: &BigRational) -> DeltaIdentity {
    let mut lhs = BigRational::zero();
    for idx in enumerate_delta(n) {
        let k = idx.order();
        let denom = idx.tau.iter().fold(BigInt::one(), |acc, &t| acc * factorial_big(u64::from(t)));
        let multi = BigRational::from_integer(factorial_big(u64::from(k)) / denom);
        lhs += multi * r.pow(k as i32);
    }
    let rhs = r * (BigRational::one() + r).pow(n as i32 - 1);
    let to_f = |q: &BigRational| q.to_f64().unwrap_or(f64::NAN);
    DeltaIdentity {
        n,
        r: to_f(r),
        lhs: to_f(&lhs),
        rhs: to_f(&rhs),
        equal: lhs == rhs,
        exact: true,
        lhs_exact: Some(lhs.to_string()),
        rhs_exact: Some(rhs.to_string()),
    }
}

/// `|τ|!^σ Π ℓ!^{(σ−1)τ_ℓ} ≤ |τ|! N!^{σ−1}`, compared in logs.
pub fn check_factorial_bound(tau: &PartitionMultiIndex, sigma: f64) -> bool {
    let k = u64::from(tau.order());
    let lhs = sigma * ln_factorial(k)
        + (sigma - 1.0)
            * tau.tau.iter().enumerate().map(|(l, &t)| f64::from(t) * ln_factorial(l as u64 + 1)).sum::<f64>();
    let rhs = ln_factorial(k) + (sigma - 1.0) * ln_factorial(tau.n as u64);
    lhs <= rhs + 1e-12 * rhs.abs().max(1.0)
}

/// `(log lhs, log rhs)` of `e^{−L|x|^{1/μ}}|x|^s ≤ (μ/L)^{μs} s!^μ`.
pub fn exp_bound_logs(x: f64, l: f64, mu: f64, s: u32) -> (f64, f64) {
    let ax = x.abs();
    let lhs = if s == 0 {
        -l * ax.powf(1.0 / mu)
    } else if ax == 0.0 {
        f64::NEG_INFINITY
    } else {
        -l * ax.powf(1.0 / mu) + f64::from(s) * ax.ln()
    };
    let rhs = mu * f64::from(s) * (mu / l).ln() + mu * ln_factorial(u64::from(s));
    (lhs, rhs)
}

pub fn check_exp_bound(x: f64, l: f64, mu: f64, s: u32) -> Result<bool> {
    if !(l > 0.0 && mu > 0.0) {
        return Err(Error::Precondition(format!("L = {l} and mu = {mu} must be positive")));
    }
    let (lhs, rhs) = exp_bound_logs(x, l, mu, s);
    Ok(lhs <= rhs + 1e-12 * rhs.abs().max(1.0))
}

/// `p(N)` from Euler's pentagonal recurrence, independent of the enumeration.
pub fn partition_count(n: usize) -> u64 {
    let mut p = vec![0i64; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut acc = 0i64;
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[m - g1];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                acc += sign * p[m - g2];
            }
        }
        p[m] = acc;
    }
    p[n].unsigned_abs()
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taus(n: usize) -> Vec<Vec<u32>> {
        enumerate_delta(n).into_iter().map(|t| t.tau).collect()
    }

    #[test]
    fn small_delta_sets() {
        assert_eq!(taus(1), vec![vec![1]]);
        assert_eq!(taus(3), vec![vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(enumerate_delta(5).len(), 7);
        assert!(enumerate_delta(0).is_empty());
    }

    #[test]
    fn counts_are_partition_numbers() {
        let known = [1u64, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385, 490, 627];
        for (i, &p) in known.iter().enumerate() {
            assert_eq!(partition_count(i + 1), p);
            assert_eq!(enumerate_delta(i + 1).len() as u64, p);
        }
    }

    #[test]
    fn faa_di_bruno_examples() {
        let e = std::f64::consts::E;
        let v = faa_di_bruno_exp(&TrigPolynomial::cos(1.0), 2, 0.0);
        assert!((v - C64::new(-e, 0.0)).norm() < 1e-14);
        assert_eq!(faa_di_bruno_exp(&TrigPolynomial::zero(), 3, 1.0), C64::new(0.0, 0.0));
        let f = TrigPolynomial::new([(1, C64::new(1.0, 0.0))]);
        let t = 0.4;
        let direct = {
            // ∂³ e^{e^{it}} with z = e^{it} and d/dt = iz d/dz
            let z = C64::from_polar(1.0, t);
            let i = C64::new(0.0, 1.0);
            i.powu(3) * (z + 3.0 * z * z + z * z * z) * z.exp()
        };
        assert!((faa_di_bruno_exp(&f, 3, t) - direct).norm() < 1e-12);
    }

    #[test]
    fn delta_identity_examples() {
        let r = check_delta_identity_exact(3, &rational(2, 1));
        assert!(r.equal && r.lhs_exact.as_deref() == Some("18"));
        assert!(check_delta_identity_exact(1, &rational(5, 1)).equal);
        assert!(check_delta_identity(12, -0.5).equal);
    }

    #[test]
    fn factorial_bound_examples() {
        let tau = PartitionMultiIndex::new(vec![1, 1, 0]).unwrap();
        assert!(check_factorial_bound(&tau, 2.0));
        for t in enumerate_delta(6) {
            assert!(check_factorial_bound(&t, 1.0) && check_factorial_bound(&t, 1.5));
        }
        assert!(PartitionMultiIndex::new(vec![1, 1]).is_err());
    }

    #[test]
    fn exp_bound_examples() {
        assert!(check_exp_bound(1.0, 1.0, 1.0, 2).unwrap());
        assert!(check_exp_bound(0.0, 1.0, 1.0, 3).unwrap());
        assert!(check_exp_bound(0.0, 1.0, 1.0, 0).unwrap());
        assert!(check_exp_bound(1.0, 0.0, 1.0, 0).is_err());
    }
}
