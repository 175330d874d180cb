//! Explicit solutions witnessing failure of global hypoellipticity.

mod cutoff;
mod sign_change;

use std::f64::consts::PI;

use serde::Serialize;

pub use cutoff::GevreyCutoff;
pub use sign_change::{
    minimize_h, sign_change_construction, HMinimum, SignChangeConstruction, SignChangeParams, SignChangeReport,
    SlopeFit, G_GRID,
};

use crate::numeric::{integrate, linspace};
use crate::solver::apply_operator;
use crate::spectral::{CylinderGrid, GridFunction};
use crate::symbols::{OperatorSpec, TrigPolynomial, C64, I};
use crate::zeroset::ZeroWitness;
use crate::{Error, Result};

/// Largest `|symbol|` accepted at a witness.
pub const WITNESS_TOL: f64 = 1e-8;
/// Largest `|k₀ + c₀ξ₀ − iq₀|` accepted for a periodic tube solution.
pub const PERIODICITY_TOL: f64 = 1e-9;

/// Adjusts `X` so that `ξ` is exactly a grid frequency, making `e^{iξx}`
/// periodic on the window and spectral derivatives exact.
fn grid_for(grid: CylinderGrid, k: i64, xi: f64) -> Result<CylinderGrid> {
    if k.unsigned_abs() as usize >= grid.m / 2 {
        return Err(Error::Precondition(format!("k = {k} is outside the grid's t-band (M = {})", grid.m)));
    }
    if xi == 0.0 {
        return Ok(grid);
    }
    let mut m0 = (xi * grid.x_half / PI).round();
    if m0 == 0.0 {
        m0 = xi.signum();
    }
    if m0.abs() >= (grid.n / 2) as f64 {
        return Err(Error::Precondition(format!("xi = {xi} is outside the grid's x-band (N = {})", grid.n)));
    }
    CylinderGrid::new(grid.m, grid.n, PI * m0 / xi)
}

/// `min_t |u(t, x)|` over the two window edges.
fn edge_modulus(u: &GridFunction) -> f64 {
    let g = u.grid;
    (0..g.m).map(|j| u.at(j, 0).norm().min(u.at(j, g.n - 1).norm())).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneWaveReport {
    pub witness: ZeroWitness,
    pub grid: CylinderGrid,
    pub residual_inf: f64,
    /// `|u|` at the edge of the x-window; 1 means no spatial decay.
    pub edge_modulus: f64,
    pub decays: bool,
}

/// `u = e^{i(kt + ξx)}` with `Pu = 0`.
pub fn plane_wave_witness(
    op: &OperatorSpec,
    w: ZeroWitness,
    grid: CylinderGrid,
) -> Result<(GridFunction, PlaneWaveReport)> {
    if !op.is_constant_coefficient() {
        return Err(Error::SymbolNotPointwise);
    }
    let residual = op.symbol_at(w.k, w.xi)?.norm();
    if residual > WITNESS_TOL {
        return Err(Error::Precondition(format!("symbol at ({}, {}) has modulus {residual:e}, not a zero", w.k, w.xi)));
    }
    let grid = grid_for(grid, w.k, w.xi)?;
    let u = GridFunction::from_fn(grid, |t, x| C64::from_polar(1.0, w.k as f64 * t + w.xi * x));
    let residual_inf = apply_operator(op, &u)?.max_abs();
    let edge = edge_modulus(&u);
    let witness = ZeroWitness { residual, ..w };
    Ok((u, PlaneWaveReport { witness, grid, residual_inf, edge_modulus: edge, decays: edge < 1e-12 }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeZeroReport {
    pub k0: i64,
    pub xi0: f64,
    /// `|k₀ + c₀ξ₀ − iq₀|`.
    pub condition_defect: f64,
    /// `max_x |v(2π, x) − v(0, x)|`.
    pub periodicity_defect: f64,
    pub grid: CylinderGrid,
    pub residual_inf: f64,
    pub edge_modulus: f64,
}

/// `v = exp(−∫₀ᵗ (iξ₀c + q₀)) e^{iξ₀x}` solving `(∂t + c∂x + q₀)v = 0`,
/// `c = a + ib`.
pub fn tube_zero_witness(
    a: &TrigPolynomial,
    b: &TrigPolynomial,
    q0: C64,
    k0: i64,
    xi0: f64,
    grid: CylinderGrid,
) -> Result<(GridFunction, TubeZeroReport)> {
    let op = OperatorSpec::tube(a.clone(), b.clone(), TrigPolynomial::constant(q0))?;
    let c = a.add(&b.scale(I));
    let c0 = c.average();
    let condition_defect = (k0 as f64 + c0 * xi0 - I * q0).norm();
    if condition_defect > PERIODICITY_TOL {
        return Err(Error::Periodicity { defect: condition_defect });
    }
    let (cz, _) = c.zero_mean_antiderivative();
    let cz0 = cz.eval(0.0);
    let exponent = |t: f64| -(I * xi0 * (c0 * t + cz.eval(t) - cz0) + q0 * t);
    let periodicity_defect = (exponent(2.0 * PI).exp() - 1.0).norm();
    let grid = grid_for(grid, k0, xi0)?;
    let v = GridFunction::from_fn(grid, |t, x| (exponent(t) + I * xi0 * x).exp());
    let residual_inf = apply_operator(&op, &v)?.max_abs();
    let edge = edge_modulus(&v);
    Ok((v, TubeZeroReport { k0, xi0, condition_defect, periodicity_defect, grid, residual_inf, edge_modulus: edge }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceRow {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    /// `λM ≥ 1`, where the Gaussian comparison guarantees the bound.
    pub in_range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplaceReport {
    pub s0: f64,
    pub delta: f64,
    /// `max ψ(s)/(s − s₀)²` over the window.
    pub m: f64,
    pub rows: Vec<LaplaceRow>,
    /// Every row with `in_range` holds.
    pub all_hold: bool,
}

/// Checks `∫_{s₀−δ}^{s₀+δ} e^{−λψ} ≥ (∫_{−δ}^{δ} e^{−s²}) (λM)^{−1/2}` for a
/// nonnegative `ψ` with a zero of order at least two at `s₀`.
pub fn laplace_lower_bound_check(
    psi: impl Fn(f64) -> f64,
    s0: f64,
    delta: f64,
    lambdas: &[f64],
) -> Result<LaplaceReport> {
    if !(delta > 0.0) {
        return Err(Error::Precondition("delta must be positive".into()));
    }
    let samples = linspace(s0 - delta, s0 + delta, 4001);
    let scale = samples.iter().map(|&s| psi(s).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if psi(s0).abs() > 1e-12 * scale {
        return Err(Error::Precondition(format!("psi(s0) = {} is not zero", psi(s0))));
    }
    let h = 1e-5 * delta;
    let slope = (psi(s0 + h) - psi(s0 - h)) / (2.0 * h);
    if slope.abs() > 1e-6 * scale / delta {
        return Err(Error::Precondition(format!("zero of order one at s0 (psi' = {slope:e})")));
    }
    if let Some(&s) = samples.iter().find(|&&s| psi(s) < 0.0) {
        return Err(Error::Precondition(format!("psi is negative at s = {s}")));
    }
    let m = samples
        .iter()
        .filter(|&&s| (s - s0).abs() > 1e-9 * delta)
        .map(|&s| psi(s) / ((s - s0) * (s - s0)))
        .fold(0.0, f64::max);
    let gauss: f64 = integrate(|s: f64| (-s * s).exp(), -delta, delta, 64);
    let rows: Vec<LaplaceRow> = lambdas
        .iter()
        .map(|&lambda| {
            let lhs: f64 = integrate(|s| (-lambda * psi(s)).exp(), s0 - delta, s0 + delta, 400);
            let rhs = gauss / (lambda * m).sqrt();
            LaplaceRow {
                lambda,
                lhs,
                rhs,
                ratio: lhs / rhs,
                holds: lhs >= rhs * (1.0 - 1e-12),
                in_range: lambda * m >= 1.0,
            }
        })
        .collect();
    let all_hold = rows.iter().all(|r| r.holds || !r.in_range);
    Ok(LaplaceReport { s0, delta, m, rows, all_hold })
}
