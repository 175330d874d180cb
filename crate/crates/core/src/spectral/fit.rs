use serde::Serialize;

use super::MixedSpectrum;
use crate::numeric::{fit_line, golden_min};
use crate::{Error, Result};

pub const ORDER_MIN: f64 = 0.30;
pub const ORDER_MAX: f64 = 6.00;
const ORDER_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    K,
    Xi,
}

/// Which part of a profile enters the fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    /// Indices with `|index| < min_index` are dropped.
    pub min_index: usize,
    /// The top fraction of the index range is dropped.
    pub tail_fraction: f64,
    /// Magnitudes below `floor · max` are dropped.
    pub floor: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { min_index: 2, tail_fraction: 0.1, floor: 1e-15 }
    }
}

/// `s ≈ C exp(−rate · |index|^{1/order})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub axis: Axis,
    pub c: f64,
    pub rate: f64,
    pub order: f64,
    /// Root-mean-square residual of `log s`.
    pub rms_residual: f64,
    pub points: usize,
    /// False when the best fit has a nonpositive rate.
    pub decaying: bool,
}

/// `(|index| as abscissa, max magnitude)` pairs over the nonnegative half of
/// an axis, folding `±index` together.
pub fn profile(s: &MixedSpectrum, axis: Axis) -> Vec<(f64, f64)> {
    let g = s.grid;
    match axis {
        Axis::K => {
            let half = (g.m / 2) as i64;
            (0..=half)
                .map(|a| {
                    let mut best = 0.0f64;
                    for k in [a, -a] {
                        for m in -(g.n as i64 / 2)..(g.n as i64 / 2) {
                            best = best.max(s.get(k, m).norm());
                        }
                    }
                    (a as f64, best)
                })
                .collect()
        }
        Axis::Xi => {
            let half = (g.n / 2) as i64;
            (0..=half)
                .map(|a| {
                    let mut best = 0.0f64;
                    for m in [a, -a] {
                        for k in -(g.m as i64 / 2)..(g.m as i64 / 2) {
                            best = best.max(s.get(k, m).norm());
                        }
                    }
                    (a as f64 * g.dxi(), best)
                })
                .collect()
        }
    }
}

/// Least nonincreasing majorant: `env[i] = max_{j ≥ i} profile[j]`.
///
/// Decay bounds only constrain this envelope, and fitting it keeps
/// isolated near-zeros of oscillating spectra out of the log residual.
pub fn envelope(profile: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = profile.to_vec();
    let mut run = 0.0f64;
    for p in out.iter_mut().rev() {
        run = run.max(p.1);
        p.1 = run;
    }
    out
}

/// Points of `profile` retained by `window`; index `i` of the profile is
/// the bin count.
pub fn windowed(profile: &[(f64, f64)], window: FitWindow) -> Vec<(f64, f64)> {
    let top = profile.iter().map(|p| p.1).fold(0.0, f64::max);
    let len = profile.len().saturating_sub(1) as f64;
    let cutoff = (1.0 - window.tail_fraction) * len;
    profile
        .iter()
        .enumerate()
        .filter(|(i, p)| *i >= window.min_index && (*i as f64) <= cutoff && p.1 > window.floor * top && p.1 > 0.0)
        .map(|(_, p)| *p)
        .collect()
}

fn fit_at_order(pts: &[(f64, f64)], order: f64) -> (f64, f64, f64) {
    let z: Vec<f64> = pts.iter().map(|p| p.0.powf(1.0 / order)).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (alpha, beta, rms) = fit_line(&z, &y);
    (alpha, -beta, rms)
}

/// Fits the decay model to `(abscissa, magnitude)` points: grid search over
/// the order, then golden-section refinement of the best grid cell.
pub fn fit_points(pts: &[(f64, f64)], axis: Axis) -> Result<DecayFit> {
    if pts.iter().all(|p| p.1 == 0.0) {
        return Err(Error::ZeroWindow);
    }
    if pts.len() < 6 {
        return Err(Error::WindowTooSmall { points: pts.len() });
    }
    let steps = ((ORDER_MAX - ORDER_MIN) / ORDER_STEP).round() as usize;
    let mut best = (ORDER_MIN, f64::INFINITY);
    for i in 0..=steps {
        let order = ORDER_MIN + i as f64 * ORDER_STEP;
        let rms = fit_at_order(pts, order).2;
        if rms < best.1 {
            best = (order, rms);
        }
    }
    let lo = (best.0 - ORDER_STEP).max(ORDER_MIN);
    let hi = (best.0 + ORDER_STEP).min(ORDER_MAX);
    let (order, rms) = golden_min(|o| fit_at_order(pts, o).2, lo, hi, 60);
    let order = if rms < best.1 { order } else { best.0 };
    let (alpha, rate, rms) = fit_at_order(pts, order);
    Ok(DecayFit { axis, c: alpha.exp(), rate, order, rms_residual: rms, points: pts.len(), decaying: rate > 0.0 })
}

pub fn fit_decay(s: &MixedSpectrum, axis: Axis, window: FitWindow) -> Result<DecayFit> {
    let pts = windowed(&envelope(&profile(s, axis)), window);
    fit_points(&pts, axis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponential_model() {
        let pts: Vec<(f64, f64)> = (2..30).map(|k| (k as f64, 2.0 * (-0.7 * k as f64).exp())).collect();
        let fit = fit_points(&pts, Axis::K).unwrap();
        assert!((fit.c - 2.0).abs() < 0.04);
        assert!((fit.rate - 0.7).abs() < 0.014);
        assert!((fit.order - 1.0).abs() < 0.02);
    }

    #[test]
    fn envelope_is_the_tail_supremum() {
        let prof = vec![(0.0, 1.0), (1.0, 0.1), (2.0, 0.5), (3.0, 0.0), (4.0, 0.2)];
        let env: Vec<f64> = envelope(&prof).into_iter().map(|p| p.1).collect();
        assert_eq!(env, vec![1.0, 0.5, 0.5, 0.2, 0.2]);
    }

    #[test]
    fn too_few_points() {
        let pts = vec![(2.0, 1.0), (3.0, 0.5)];
        assert!(matches!(fit_points(&pts, Axis::K), Err(Error::WindowTooSmall { points: 2 })));
        let zeros = vec![(2.0, 0.0); 8];
        assert!(matches!(fit_points(&zeros, Axis::K), Err(Error::ZeroWindow)));
    }

    #[test]
    fn window_drops_head_tail_and_floor() {
        let prof: Vec<(f64, f64)> = (0..=20).map(|i| (i as f64, if i == 15 { 1e-20 } else { 1.0 })).collect();
        let w = windowed(&prof, FitWindow::default());
        assert_eq!(w.first().unwrap().0, 2.0);
        assert_eq!(w.last().unwrap().0, 18.0);
        assert!(w.iter().all(|p| p.0 != 15.0));
    }
}
