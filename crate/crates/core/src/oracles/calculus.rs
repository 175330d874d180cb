use std::f64::consts::TAU;

use crate::symbols::{TrigPolynomial, C64};
use crate::{Error, Result};

/// Finite-difference weights for the `m`-th derivative at `x0` from values
/// at `nodes` (Fornberg's recurrence).
pub fn fd_weights(m: usize, nodes: &[f64], x0: f64) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Central difference on `2p + 1` points spaced `h` apart.
pub fn fd_derivative(f: impl Fn(f64) -> C64, n: usize, t: f64, h: f64, p: usize) -> C64 {
    let offsets: Vec<f64> = (0..=2 * p).map(|i| (i as f64 - p as f64) * h).collect();
    let w = fd_weights(n, &offsets, 0.0);
    offsets.iter().zip(&w).map(|(&o, &wi)| f(t + o) * wi).sum()
}

/// `min |g|` over 4096 samples of one period.
pub fn min_modulus(g: &TrigPolynomial) -> (f64, f64) {
    (0..4096)
        .map(|j| {
            let t = TAU * j as f64 / 4096.0;
            (t, g.eval(t).norm())
        })
        .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `∂ⁿ(1/g)` as `Σ_{k=1}^n (−1)^k C(n+1, k+1) g^{−(k+1)} ∂ⁿ(g^k)`.
pub fn reciprocal_derivative(g: &TrigPolynomial, n: u32, t: f64) -> Result<C64> {
    let (tmin, m) = min_modulus(g);
    if m <= 1e-12 * g.abs_sum().max(f64::MIN_POSITIVE) {
        return Err(Error::Vanishes { t: tmin });
    }
    let gt = g.eval(t);
    if n == 0 {
        return Ok(1.0 / gt);
    }
    let mut acc = C64::new(0.0, 0.0);
    let mut gk = TrigPolynomial::real_constant(1.0);
    for k in 1..=n {
        gk = gk.mul(g);
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        acc += sign * binomial(u64::from(n) + 1, u64::from(k) + 1) * gk.eval_deriv(n, t) / gt.powu(k + 1);
    }
    Ok(acc)
}

/// Steps used by the RK4 oracle over one period.
pub const RK_STEPS: usize = 4096;

/// Classical RK4 for `u' + θu = g` on `[0, 2π]` from `u(0) = u0`.
/// Returns `u` at `t_j = 2πj/steps`, `j = 0..=steps`.
pub fn rk_ode_oracle(theta: impl Fn(f64) -> C64, g: impl Fn(f64) -> C64, u0: C64, steps: usize) -> Vec<C64> {
    let h = TAU / steps as f64;
    let rhs = |t: f64, u: C64| g(t) - theta(t) * u;
    let mut out = Vec::with_capacity(steps + 1);
    let mut u = u0;
    out.push(u);
    for j in 0..steps {
        let t = j as f64 * h;
        let k1 = rhs(t, u);
        let k2 = rhs(t + h / 2.0, u + k1 * (h / 2.0));
        let k3 = rhs(t + h / 2.0, u + k2 * (h / 2.0));
        let k4 = rhs(t + h, u + k3 * h);
        u += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        out.push(u);
    }
    out
}
