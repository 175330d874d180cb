//! Mixed Fourier analysis on `T¹ × R` grids and decay-rate estimation.

mod fit;
mod grid;
mod transform;

use serde::Serialize;

pub use fit::{envelope, fit_decay, fit_points, profile, windowed, Axis, DecayFit, FitWindow, ORDER_MAX, ORDER_MIN};
pub use grid::{CylinderGrid, GridFunction, MixedSpectrum};
pub use transform::{
    apply_t_multiplier, apply_x_multiplier, d_dt, d_dx, forward_mixed, forward_mixed_with, forward_x, inverse_mixed,
    inverse_mixed_with, inverse_x, partial_from_spectrum, spectrum_from_partial,
};

use crate::Error;

/// Slack allowed between a fitted order and the claimed one.
pub const ORDER_SLACK: f64 = 0.15;
/// Largest log-domain rms for which a fit counts as trustworthy.
pub const RMS_LIMIT: f64 = 0.5;
/// Truncation monitor: `|f|` must stay below this at `|x| > X − 1`.
pub const TRUNCATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AxisVerdict {
    Fitted {
        fit: DecayFit,
        consistent: bool,
    },
    /// Too few bins above the floor to fit; the spectrum is concentrated.
    /// Finitely many t-modes are fine, but a ξ-spectrum this narrow means
    /// the samples do not decay across the x-window.
    Degenerate {
        points: usize,
        consistent: bool,
    },
}

impl AxisVerdict {
    pub fn consistent(&self) -> bool {
        match self {
            Self::Fitted { consistent, .. } => *consistent,
            Self::Degenerate { consistent, .. } => *consistent,
        }
    }

    pub fn fit(&self) -> Option<&DecayFit> {
        match self {
            Self::Fitted { fit, .. } => Some(fit),
            Self::Degenerate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub sigma_claim: f64,
    pub mu_claim: f64,
    pub k_axis: AxisVerdict,
    pub xi_axis: AxisVerdict,
    pub consistent: bool,
    /// Set when the samples do not vanish near the edge of the x-window.
    pub truncation_warning: bool,
    pub boundary_max: Option<f64>,
    /// Finite proxy used for the derivative suprema.
    pub proxy: &'static str,
    pub k_profile: Vec<(f64, f64)>,
    pub xi_profile: Vec<(f64, f64)>,
}

fn judge(s: &MixedSpectrum, axis: Axis, claim: f64) -> AxisVerdict {
    match fit_decay(s, axis, FitWindow::default()) {
        Ok(fit) => {
            let consistent = fit.decaying && fit.order <= claim + ORDER_SLACK && fit.rms_residual < RMS_LIMIT;
            AxisVerdict::Fitted { fit, consistent }
        }
        Err(Error::WindowTooSmall { points }) => AxisVerdict::Degenerate { points, consistent: axis == Axis::K },
        Err(_) => AxisVerdict::Degenerate { points: 0, consistent: axis == Axis::K },
    }
}

/// Decay-based consistency of a spectrum with `(σ, μ)`.
pub fn membership_report_spectrum(s: &MixedSpectrum, sigma_claim: f64, mu_claim: f64) -> MembershipReport {
    let k_axis = judge(s, Axis::K, sigma_claim);
    let xi_axis = judge(s, Axis::Xi, mu_claim);
    MembershipReport {
        sigma_claim,
        mu_claim,
        consistent: k_axis.consistent() && xi_axis.consistent(),
        k_axis,
        xi_axis,
        truncation_warning: false,
        boundary_max: None,
        proxy: "max over the other axis of |f~(k,xi)|, no derivative weights",
        k_profile: profile(s, Axis::K),
        xi_profile: profile(s, Axis::Xi),
    }
}

pub fn membership_report(f: &GridFunction, sigma_claim: f64, mu_claim: f64) -> MembershipReport {
    let mut r = membership_report_spectrum(&forward_mixed(f), sigma_claim, mu_claim);
    let edge = f.boundary_max(1.0);
    r.truncation_warning = edge >= TRUNCATION_TOL;
    r.boundary_max = Some(edge);
    r
}
