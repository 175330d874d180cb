//! Periodic solutions of `u' + θ(t)u = g(t)` on `[0, 2π)`.
//!
//! Both closed-form branches are evaluated panel by panel: on each grid
//! cell the exact antiderivative of `θ` gives the propagator, and the
//! forcing integral uses Gauss–Legendre nodes with `g` taken from its
//! trigonometric interpolant. `sol−` marches forward and is stable when
//! `Re θ₀ ≥ 0`; `sol+` marches backward and is stable when `Re θ₀ < 0`.

use rustfft::FftPlanner;
use serde::Serialize;

use crate::numeric::{gauss, nearest_integer};
use crate::symbols::{TrigPolynomial, C64};
use crate::{Error, Result};

/// Largest real exponent evaluated before refusing with an error.
pub const EXP_GUARD: f64 = 700.0;
/// Tolerance for `θ₀ ∈ iZ`.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Relative tolerance for the compatibility integral on resonant fibers.
pub const COMPAT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Auto,
    SolMinus,
    SolPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchUsed {
    SolMinus,
    SolPlus,
    /// `θ₀ ∈ iZ` with a vanishing compatibility integral.
    Resonant,
    /// Forcing identically zero; the solution is zero.
    Trivial,
}

/// `u' + θu = g` with `g` sampled at `t_j = 2πj/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOdeProblem {
    pub theta: TrigPolynomial,
    pub g: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub u: Vec<C64>,
    pub branch: BranchUsed,
    /// `|1 − e^{∓2πθ₀}|` for the branch used.
    pub conditioning: f64,
}

impl PeriodicOdeProblem {
    pub fn new(theta: TrigPolynomial, g: Vec<C64>) -> Self {
        Self { theta, g }
    }

    pub fn from_trig(theta: TrigPolynomial, g: &TrigPolynomial, m: usize) -> Self {
        let g = (0..m).map(|j| g.eval(std::f64::consts::TAU * j as f64 / m as f64)).collect();
        Self { theta, g }
    }

    pub fn theta0(&self) -> C64 {
        self.theta.average()
    }

    pub fn is_resonant(&self) -> bool {
        let t0 = self.theta0();
        t0.re.abs() <= RESONANCE_TOL && nearest_integer(t0.im).1 <= RESONANCE_TOL
    }

    fn step(&self) -> f64 {
        std::f64::consts::TAU / self.g.len() as f64
    }
}

/// Values of the trigonometric interpolant of `g` at `t_j + δ` for every `j`.
fn shifted(g_hat: &[C64], delta: f64, fft: &dyn rustfft::Fft<f64>) -> Vec<C64> {
    let m = g_hat.len();
    let half = (m / 2) as i64;
    let mut buf: Vec<C64> = g_hat
        .iter()
        .enumerate()
        .map(|(idx, &c)| {
            let n = if (idx as i64) < half || m == 1 { idx as i64 } else { idx as i64 - m as i64 };
            if m % 2 == 0 && idx as i64 == half {
                // Nyquist term interpolates as a cosine.
                c * (half as f64 * delta).cos()
            } else {
                c * C64::from_polar(1.0, n as f64 * delta)
            }
        })
        .collect();
    fft.process(&mut buf);
    buf
}

/// Propagators and forcing integrals of every panel, for one direction.
struct Panels {
    prop: Vec<C64>,
    forcing: Vec<C64>,
}

fn guarded_exp(z: C64) -> Result<C64> {
    if z.re > EXP_GUARD {
        return Err(Error::ExponentOverflow { exponent: z.re });
    }
    Ok(z.exp())
}

/// `forward = true`: `E_j = e^{−(Θ(t_{j+1})−Θ(t_j))}`,
/// `I_j = ∫ e^{−(Θ(t_{j+1})−Θ(r))} g(r) dr`.
/// `forward = false`: `F_j = e^{Θ(t_{j+1})−Θ(t_j)}`,
/// `J_j = ∫ e^{Θ(r)−Θ(t_j)} g(r) dr`.
fn panels(prob: &PeriodicOdeProblem, forward: bool) -> Result<Panels> {
    let m = prob.g.len();
    let h = prob.step();
    let theta0 = prob.theta0();
    let (phi, _) = prob.theta.zero_mean_antiderivative();
    // Θ(t) − Θ(s) = θ₀(t − s) + Φ(t) − Φ(s)
    let big_theta_diff = |t: f64, s: f64, phi_t: C64, phi_s: C64| theta0 * (t - s) + phi_t - phi_s;

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut g_hat = prob.g.clone();
    fwd.process(&mut g_hat);
    g_hat.iter_mut().for_each(|c| *c /= m as f64);

    let phi_grid: Vec<C64> = (0..=m).map(|j| phi.eval(j as f64 * h)).collect();
    let mut prop = Vec::with_capacity(m);
    for j in 0..m {
        let d = big_theta_diff((j + 1) as f64 * h, j as f64 * h, phi_grid[j + 1], phi_grid[j]);
        prop.push(guarded_exp(if forward { -d } else { d })?);
    }
    let mut forcing = vec![C64::new(0.0, 0.0); m];
    for &(node, weight) in gauss() {
        let delta = 0.5 * h * (1.0 + node);
        let g_nodes = shifted(&g_hat, delta, inv.as_ref());
        for j in 0..m {
            let (tj, tj1) = (j as f64 * h, (j + 1) as f64 * h);
            let r = tj + delta;
            let phi_r = phi.eval(r);
            let expo = if forward {
                -big_theta_diff(tj1, r, phi_grid[j + 1], phi_r)
            } else {
                big_theta_diff(r, tj, phi_r, phi_grid[j])
            };
            forcing[j] += 0.5 * h * weight * guarded_exp(expo)? * g_nodes[j];
        }
    }
    Ok(Panels { prop, forcing })
}

/// Forward march `u_{j+1} = E_j u_j + I_j`, closed periodically.
fn sol_minus(prob: &PeriodicOdeProblem) -> Result<OdeSolution> {
    let m = prob.g.len();
    let Panels { prop, forcing } = panels(prob, true)?;
    let mut v = C64::new(0.0, 0.0);
    let mut product = C64::new(1.0, 0.0);
    for j in 0..m {
        v = prop[j] * v + forcing[j];
        product *= prop[j];
    }
    let denom = C64::new(1.0, 0.0) - product;
    let mut u = vec![v / denom; m];
    for j in 0..m - 1 {
        u[j + 1] = prop[j] * u[j] + forcing[j];
    }
    Ok(OdeSolution { u, branch: BranchUsed::SolMinus, conditioning: denom.norm() })
}

/// Backward march `u_j = F_j u_{j+1} − J_j`, closed periodically.
fn sol_plus(prob: &PeriodicOdeProblem) -> Result<OdeSolution> {
    let m = prob.g.len();
    let Panels { prop, forcing } = panels(prob, false)?;
    let mut w = C64::new(0.0, 0.0);
    let mut product = C64::new(1.0, 0.0);
    for j in (0..m).rev() {
        w = prop[j] * w - forcing[j];
        product *= prop[j];
    }
    let denom = C64::new(1.0, 0.0) - product;
    let mut u = vec![w / denom; m];
    let mut next = u[0];
    for j in (1..m).rev() {
        u[j] = prop[j] * next - forcing[j];
        next = u[j];
    }
    Ok(OdeSolution { u, branch: BranchUsed::SolPlus, conditioning: denom.norm() })
}

/// Resonant fiber: the solution with `u(0) = 0` if the compatibility
/// integral vanishes.
fn resonant(prob: &PeriodicOdeProblem) -> Result<OdeSolution> {
    let m = prob.g.len();
    let Panels { prop, forcing } = panels(prob, true)?;
    let mut u = vec![C64::new(0.0, 0.0); m];
    let mut v = C64::new(0.0, 0.0);
    for j in 0..m {
        v = prop[j] * v + forcing[j];
        if j + 1 < m {
            u[j + 1] = v;
        }
    }
    let scale = std::f64::consts::TAU * prob.g.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if v.norm() > COMPAT_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::UnsolvableFiber { defect: v.norm() });
    }
    Ok(OdeSolution { u, branch: BranchUsed::Resonant, conditioning: 0.0 })
}

pub fn solve_periodic_ode(prob: &PeriodicOdeProblem, branch: Branch) -> Result<OdeSolution> {
    let m = prob.g.len();
    if m == 0 {
        return Err(Error::Precondition("empty sample vector".into()));
    }
    if prob.g.iter().all(|c| *c == C64::new(0.0, 0.0)) {
        return Ok(OdeSolution { u: prob.g.clone(), branch: BranchUsed::Trivial, conditioning: f64::NAN });
    }
    if prob.is_resonant() {
        return resonant(prob);
    }
    let t0 = prob.theta0();
    let branch = match branch {
        Branch::Auto if t0.re < 0.0 => Branch::SolPlus,
        Branch::Auto => Branch::SolMinus,
        b => b,
    };
    // The closing factor e^{∓2πθ₀} must stay representable.
    let closing = std::f64::consts::TAU * t0.re;
    match branch {
        Branch::SolMinus if -closing > EXP_GUARD => Err(Error::ExponentOverflow { exponent: -closing }),
        Branch::SolPlus if closing > EXP_GUARD => Err(Error::ExponentOverflow { exponent: closing }),
        Branch::SolMinus => sol_minus(prob),
        _ => sol_plus(prob),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;

    fn ts(m: usize) -> impl Iterator<Item = f64> {
        (0..m).map(move |j| TAU * j as f64 / m as f64)
    }

    #[test]
    fn constant_damping_matches_closed_form() {
        let prob = PeriodicOdeProblem::from_trig(TrigPolynomial::real_constant(1.0), &TrigPolynomial::cos(1.0), 256);
        let sol = solve_periodic_ode(&prob, Branch::Auto).unwrap();
        assert_eq!(sol.branch, BranchUsed::SolMinus);
        let err =
            ts(256).zip(&sol.u).map(|(t, u)| (u - C64::new((t.cos() + t.sin()) / 2.0, 0.0)).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn branches_agree() {
        let theta = TrigPolynomial::new([(0, C64::new(0.4, 0.3)), (1, C64::new(0.2, -0.1)), (-2, C64::new(0.0, 0.5))]);
        let g = TrigPolynomial::new([(0, C64::new(1.0, 0.0)), (3, C64::new(0.0, 0.7))]);
        let prob = PeriodicOdeProblem::from_trig(theta, &g, 128);
        let a = solve_periodic_ode(&prob, Branch::SolMinus).unwrap();
        let b = solve_periodic_ode(&prob, Branch::SolPlus).unwrap();
        let d = a.u.iter().zip(&b.u).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn resonant_fibers() {
        let i = C64::new(0.0, 1.0);
        let theta = TrigPolynomial::constant(i);
        let prob = PeriodicOdeProblem::from_trig(theta.clone(), &TrigPolynomial::new([(1, C64::new(1.0, 0.0))]), 128);
        let sol = solve_periodic_ode(&prob, Branch::Auto).unwrap();
        assert_eq!(sol.branch, BranchUsed::Resonant);
        let err = ts(128)
            .zip(&sol.u)
            .map(|(t, u)| {
                let want = C64::from_polar(1.0, -t) * (C64::from_polar(1.0, 2.0 * t) - 1.0) / (2.0 * i);
                (u - want).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        let bad = PeriodicOdeProblem::from_trig(theta, &TrigPolynomial::new([(-1, C64::new(1.0, 0.0))]), 128);
        match solve_periodic_ode(&bad, Branch::Auto) {
            Err(Error::UnsolvableFiber { defect }) => assert!((defect - TAU).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_branch_overflow_is_an_error() {
        let prob = PeriodicOdeProblem::from_trig(TrigPolynomial::real_constant(200.0), &TrigPolynomial::cos(1.0), 64);
        assert!(matches!(solve_periodic_ode(&prob, Branch::SolPlus), Err(Error::ExponentOverflow { .. })));
        assert!(solve_periodic_ode(&prob, Branch::Auto).is_ok());
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let prob = PeriodicOdeProblem::new(TrigPolynomial::real_constant(1.0), vec![C64::new(0.0, 0.0); 16]);
        let sol = solve_periodic_ode(&prob, Branch::Auto).unwrap();
        assert!(sol.u.iter().all(|u| u.norm() == 0.0));
    }
}
