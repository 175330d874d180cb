//! Small numerical helpers shared across modules.

use std::num::NonZeroUsize;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`.
/// Returns `(argmin, min)`; the endpoints are included as candidates.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let (fa0, fb0) = (f(a), f(b));
    let (a0, b0) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    [(c, fc), (d, fd), (a0, fa0), (b0, fb0)].into_iter().fold((c, f64::INFINITY), |best, cand| {
        if cand.1 < best.1 {
            cand
        } else {
            best
        }
    })
}

/// `n` points from `a` to `b` inclusive.
pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` log-spaced points from `a > 0` to `b > 0` inclusive.
pub(crate) fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

/// Ordinary least squares `y ≈ α + β x`; returns `(α, β, rms)`.
/// Sums run in index order so results do not depend on scheduling.
pub(crate) fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let beta = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let alpha = my - beta * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(u, v)| {
            let r = v - alpha - beta * u;
            r * r
        })
        .sum();
    (alpha, beta, (ss / n).sqrt())
}

/// Distance from `v` to the nearest integer, and that integer.
pub(crate) fn nearest_integer(v: f64) -> (i64, f64) {
    let r = v.round();
    (r as i64, (v - r).abs())
}

const GAUSS_NODES: usize = 12;

/// 12-point Gauss–Legendre nodes and weights on `[−1, 1]`.
pub(crate) fn gauss() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NonZeroUsize::new(GAUSS_NODES).expect("nonzero");
        GaussLegendre::new(n).as_node_weight_pairs().to_vec()
    })
}

/// Composite 12-point Gauss–Legendre rule over `panels` equal panels.
pub(crate) fn integrate<T, F>(f: F, a: f64, b: f64, panels: usize) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let h = (b - a) / panels as f64;
    let mut acc = T::default();
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(node, weight) in gauss() {
            acc = acc + f(mid + 0.5 * h * node) * (0.5 * h * weight);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, fx) = golden_min(|x| (x - 0.3) * (x - 0.3) + 1.0, -2.0, 2.0, 80);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn line_fit_exact() {
        let x = linspace(0.0, 1.0, 11);
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 3.0 * v).collect();
        let (a, b, rms) = fit_line(&x, &y);
        assert!((a - 2.0).abs() < 1e-14 && (b + 3.0).abs() < 1e-14 && rms < 1e-14);
    }

    #[test]
    fn logspace_endpoints() {
        let v = logspace(1.0, 1000.0, 4);
        assert!((v[1] - 10.0).abs() < 1e-12 && (v[3] - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn gauss_rule_integrates_smooth_functions() {
        let v: f64 = integrate(|x: f64| x.exp(), 0.0, 1.0, 1);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        let w: f64 = integrate(|x: f64| x.powi(23), -1.0, 1.0, 1);
        assert!(w.abs() < 1e-15);
        let s: f64 = integrate(|x: f64| x.sin().powi(2), 0.0, std::f64::consts::TAU, 4);
        assert!((s - std::f64::consts::PI).abs() < 1e-13);
    }
}
