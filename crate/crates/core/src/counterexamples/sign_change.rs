//! Slowly decaying solution for a tube operator whose `b` changes sign.
//!
//! With `H(t,s) = ∫_t^{t+ds} b` (`d = +1` when `b₀ ≥ 0`, else `d = −1`) and
//! `B = min H < 0`, the forcing
//! `f̂(t,ξ) = d(e^{2πdθ₀} − 1) e^{Bξ} ψ(ξ) φ(t) e^{−λ(t − t*)}`, `λ = iξa₀ + q₀`,
//! is Gelfand–Shilov in `ξ`, while the periodic solution
//! `û(t,ξ) = ψ(ξ) ∫₀^{2π} φ(t+ds) e^{ξ(B − H(t,s))} e^{−λ(t−t*)} e^{λ(w−ŵ)} ds`
//! only decays like `ξ^{−1/2}` at `t = t*` (Laplace's method at the
//! interior minimum of `H(t*, ·)`). Here `w = t + ds` and `ŵ` is the copy of
//! `w` mod 2π nearest to the bump centre, which keeps `f̂` smooth and periodic
//! even when the bump straddles `t = 0`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::cutoff::GevreyCutoff;
use crate::classifier::{classify_first_order_t, sign_change, SignClass, Verdict};
use crate::exec::Exec;
use crate::numeric::{fit_line, integrate, linspace, logspace};
use crate::spectral::{membership_report_spectrum, spectrum_from_partial, CylinderGrid, MembershipReport};
use crate::symbols::{TrigPolynomial, C64, I};
use crate::{Error, Result};

/// Grid resolution per axis for the initial search of `min H`.
pub const G_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignChangeParams {
    /// Gevrey order of the `t` cutoff `φ`.
    pub sigma1: f64,
    /// Gevrey order of the `ξ` cutoff `ψ`; must exceed 1.
    pub mu: f64,
    /// Half-width of the support of `φ`.
    pub delta: f64,
    /// `ξ` range for the slope fit of `|û(t*, ξ)|`.
    pub slope_range: (f64, f64),
    pub slope_points: usize,
    /// Fibers on which the ODE residual is measured.
    pub residual_xis: [f64; 8],
    /// Grid for the decay fit of `f̂`. The `t` cutoff's spectrum only
    /// reaches its asymptotic shape past `|k| ≈ 200`, hence the large `M`.
    pub membership_grid: CylinderGrid,
}

impl Default for SignChangeParams {
    fn default() -> Self {
        Self {
            sigma1: 1.5,
            mu: 2.0,
            delta: 0.3,
            slope_range: (50.0, 2000.0),
            slope_points: 40,
            residual_xis: [0.5, 1.0, 1.5, 2.0, 5.0, 10.0, 20.0, 50.0],
            membership_grid: CylinderGrid { m: 1024, n: 512, x_half: 12.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HMinimum {
    pub t: f64,
    pub s: f64,
    pub value: f64,
    /// `+1` integrates forward from `t`, `−1` backward.
    pub direction: i8,
}

/// `H(t,s) = ∫_t^{t+ds} b`, evaluated exactly.
#[derive(Debug, Clone)]
struct Primitive {
    b0: f64,
    zero_mean: TrigPolynomial,
}

impl Primitive {
    fn new(b: &TrigPolynomial) -> Self {
        Self { b0: b.average().re, zero_mean: b.zero_mean_antiderivative().0 }
    }

    fn at(&self, t: f64) -> f64 {
        self.b0 * t + self.zero_mean.eval(t).re
    }
}

/// Grid search followed by Newton refinement on the exact gradient.
pub fn minimize_h(b: &TrigPolynomial, direction: i8) -> HMinimum {
    let prim = Primitive::new(b);
    let d = f64::from(direction);
    let h = |t: f64, s: f64| prim.at(t + d * s) - prim.at(t);
    let nodes = linspace(0.0, TAU, G_GRID);
    let mut best = (0.0, 0.0, f64::INFINITY);
    for &t in &nodes {
        for &s in &nodes {
            let v = h(t, s);
            if v < best.2 {
                best = (t, s, v);
            }
        }
    }
    let db = b.derivative();
    let (mut t, mut s) = (best.0, best.1);
    for _ in 0..50 {
        let w = t + d * s;
        let (bw, bt) = (b.eval(w).re, b.eval(t).re);
        let (dbw, dbt) = (db.eval(w).re, db.eval(t).re);
        let (gt, gs) = (bw - bt, d * bw);
        let (htt, hts, hss) = (dbw - dbt, d * dbw, dbw);
        let det = htt * hss - hts * hts;
        if det <= 0.0 {
            break;
        }
        let nt = t - (hss * gt - hts * gs) / det;
        let ns = (s - (htt * gs - hts * gt) / det).clamp(0.0, TAU);
        if h(nt, ns) > h(t, s) {
            break;
        }
        let moved = (nt - t).abs() + (ns - s).abs();
        (t, s) = (nt, ns);
        if moved < 1e-15 {
            break;
        }
    }
    HMinimum { t: t.rem_euclid(TAU), s, value: h(t, s), direction }
}

#[derive(Debug, Clone)]
pub struct SignChangeConstruction {
    pub a0: f64,
    pub b: TrigPolynomial,
    pub q0: C64,
    pub params: SignChangeParams,
    pub minimum: HMinimum,
    /// Unreduced bump centre `t* + ds*`.
    pub center: f64,
    pub phi: GevreyCutoff,
    pub psi: GevreyCutoff,
    prim: Primitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms: f64,
    pub xi_range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignChangeReport {
    pub a0: f64,
    pub b0: f64,
    pub q0: [f64; 2],
    pub minimum: HMinimum,
    pub phi: GevreyCutoff,
    pub psi: GevreyCutoff,
    pub sigma1: f64,
    pub mu: f64,
    /// Max over sampled fibers of the one-step integrated ODE defect.
    pub ode_residual: f64,
    pub u_profile: Vec<(f64, f64)>,
    pub slope: SlopeFit,
    pub slope_in_band: bool,
    pub f_membership: MembershipReport,
}

impl SignChangeConstruction {
    pub fn new(a0: f64, b: &TrigPolynomial, q0: C64, params: SignChangeParams) -> Result<Self> {
        if !b.is_real_valued() {
            return Err(Error::Precondition("b must be real-valued".into()));
        }
        if sign_change(b).class != SignClass::ChangesSign {
            return Err(Error::Precondition("b does not change sign".into()));
        }
        if !(params.mu > 1.0) {
            return Err(Error::Precondition(format!(
                "mu = {} is outside the range where the construction applies (mu > 1)",
                params.mu
            )));
        }
        CylinderGrid::new(params.membership_grid.m, params.membership_grid.n, params.membership_grid.x_half)?;
        if !(params.delta > 0.0 && params.delta < PI) {
            return Err(Error::Precondition(format!("delta = {} must lie in (0, pi)", params.delta)));
        }
        let b0 = b.average().re;
        let averaged = classify_first_order_t(a0, b0, q0);
        if averaged.verdict != Verdict::Gh {
            return Err(Error::Precondition(
                "the averaged constant operator is not globally hypoelliptic; use its zero witness instead".into(),
            ));
        }
        let direction = if b0 >= 0.0 { 1 } else { -1 };
        let minimum = minimize_h(b, direction);
        let center = minimum.t + f64::from(direction) * minimum.s;
        Ok(Self {
            a0,
            b: b.clone(),
            q0,
            params,
            minimum,
            center,
            phi: GevreyCutoff::bump(params.sigma1, center, params.delta)?,
            psi: GevreyCutoff::half_line(params.mu)?,
            prim: Primitive::new(b),
        })
    }

    fn d(&self) -> f64 {
        f64::from(self.minimum.direction)
    }

    fn lambda(&self, xi: f64) -> C64 {
        I * xi * self.a0 + self.q0
    }

    /// `θ(t) = λ − ξ b(t)`.
    pub fn theta(&self, xi: f64) -> TrigPolynomial {
        self.b.scale(C64::new(-xi, 0.0)).add(&TrigPolynomial::constant(self.lambda(xi)))
    }

    /// `∫_α^β θ`.
    fn theta_integral(&self, xi: f64, alpha: f64, beta: f64) -> C64 {
        self.lambda(xi) * (beta - alpha) - xi * (self.prim.at(beta) - self.prim.at(alpha))
    }

    /// Copy of `w` mod 2π nearest the bump centre.
    fn rep(&self, w: f64) -> f64 {
        w + TAU * ((self.center - w) / TAU).round()
    }

    pub fn f_hat(&self, t: f64, xi: f64) -> C64 {
        let psi = self.psi.eval(xi);
        let w = self.rep(t);
        let phi = self.phi.eval(w);
        if psi == 0.0 || phi == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let d = self.d();
        let theta0 = self.lambda(xi) - xi * self.prim.b0;
        let pref = d * ((TAU * d * theta0).exp() - 1.0);
        pref * (self.minimum.value * xi).exp() * psi * phi * (-self.lambda(xi) * (w - self.minimum.t)).exp()
    }

    pub fn u_hat(&self, t: f64, xi: f64) -> C64 {
        let psi = self.psi.eval(xi);
        if psi == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let d = self.d();
        let lam = self.lambda(xi);
        let delta = self.params.delta;
        let panels = 32 + (8.0 * delta * (xi.max(1.0) * self.b.abs_sum()).sqrt()).ceil() as usize;
        let integrand = |s: f64| {
            let w = t + d * s;
            let wr = self.rep(w);
            let phi = self.phi.eval(wr);
            if phi == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let hts = self.prim.at(w) - self.prim.at(t);
            let re = xi * (self.minimum.value - hts);
            (re + lam * (w - wr)).exp() * phi
        };
        let mut acc = C64::new(0.0, 0.0);
        for n in -2..=2 {
            let sc = d * (self.center + TAU * f64::from(n) - t);
            let (lo, hi) = ((sc - delta).max(0.0), (sc + delta).min(TAU));
            if lo < hi {
                acc += integrate(integrand, lo, hi, panels);
            }
        }
        acc * psi * (-lam * (t - self.minimum.t)).exp()
    }

    /// Max over `j` of `|û(t_{j+1}) − e^{−∫θ}û(t_j) − ∫ e^{−∫_w θ} f̂(w) dw|`
    /// on a step small enough that `|ξ|·‖b‖·h ≤ 1/4`.
    pub fn fiber_residual(&self, xi: f64) -> f64 {
        let steps = 256usize.max((TAU * xi.abs() * self.b.abs_sum() / 0.25).ceil() as usize);
        let h = TAU / steps as f64;
        let u: Vec<C64> = (0..=steps).map(|j| self.u_hat(j as f64 * h, xi)).collect();
        let mut worst = 0.0f64;
        for j in 0..steps {
            let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
            let carry = (-self.theta_integral(xi, a, b)).exp() * u[j];
            let forced: C64 = integrate(|w| (-self.theta_integral(xi, w, b)).exp() * self.f_hat(w, xi), a, b, 2);
            worst = worst.max((u[j + 1] - carry - forced).norm());
        }
        worst.max((u[steps] - u[0]).norm())
    }

    /// `|û(t*, ξ)|` on a log grid and its log-log slope.
    pub fn slope_fit(&self, exec: Exec) -> (Vec<(f64, f64)>, SlopeFit) {
        let (lo, hi) = self.params.slope_range;
        let xis = logspace(lo, hi, self.params.slope_points);
        let mags = exec.map_range(xis.len(), |i| self.u_hat(self.minimum.t, xis[i]).norm());
        let profile: Vec<(f64, f64)> = xis.iter().copied().zip(mags).collect();
        let lx: Vec<f64> = profile.iter().map(|p| p.0.ln()).collect();
        let ly: Vec<f64> = profile.iter().map(|p| p.1.ln()).collect();
        let (intercept, slope, rms) = fit_line(&lx, &ly);
        (profile, SlopeFit { slope, intercept, rms, xi_range: (lo, hi) })
    }

    /// Samples `f̂` on the grid's `(t, ξ)` nodes and fits its mixed spectrum.
    pub fn f_membership(&self, grid: CylinderGrid) -> MembershipReport {
        let mut partial = vec![C64::new(0.0, 0.0); grid.len()];
        for j in 0..grid.m {
            for c in 0..grid.n {
                partial[j * grid.n + c] = self.f_hat(grid.t(j), grid.xi_of_col(c));
            }
        }
        let s = spectrum_from_partial(grid, &partial);
        membership_report_spectrum(&s, self.params.sigma1.max(self.params.mu), self.params.mu)
    }

    pub fn report(&self, exec: Exec) -> SignChangeReport {
        let xis = self.params.residual_xis;
        let ode_residual = exec.map_range(xis.len(), |i| self.fiber_residual(xis[i])).into_iter().fold(0.0, f64::max);
        let (u_profile, slope) = self.slope_fit(exec);
        SignChangeReport {
            a0: self.a0,
            b0: self.prim.b0,
            q0: [self.q0.re, self.q0.im],
            minimum: self.minimum,
            phi: self.phi,
            psi: self.psi,
            sigma1: self.params.sigma1,
            mu: self.params.mu,
            ode_residual,
            u_profile,
            slope_in_band: (-0.6..=-0.4).contains(&slope.slope),
            slope,
            f_membership: self.f_membership(self.params.membership_grid),
        }
    }
}

pub fn sign_change_construction(
    a0: f64,
    b: &TrigPolynomial,
    q0: C64,
    params: SignChangeParams,
) -> Result<(SignChangeConstruction, SignChangeReport)> {
    let c = SignChangeConstruction::new(a0, b, q0, params)?;
    let r = c.report(Exec::default());
    Ok((c, r))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;

    #[test]
    fn cosine_minimum() {
        let m = minimize_h(&TrigPolynomial::cos(1.0), 1);
        assert!((m.value + 2.0).abs() < 1e-12, "{m:?}");
        assert!((m.t - FRAC_PI_2).abs() < 1e-6 && (m.s - PI).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn preconditions() {
        let q0 = C64::new(0.0, 0.3);
        let p = SignChangeParams::default();
        let one = TrigPolynomial::real_constant(1.0);
        assert!(SignChangeConstruction::new(0.0, &one.add(&TrigPolynomial::cos(1.0)), q0, p).is_err());
        let low = SignChangeParams { mu: 1.0, ..p };
        assert!(SignChangeConstruction::new(0.0, &TrigPolynomial::cos(1.0), q0, low).is_err());
        // averaged operator ∂t + i ∂x is not GH
        assert!(SignChangeConstruction::new(0.0, &TrigPolynomial::cos(1.0), C64::new(0.0, 1.0), p).is_err());
        assert!(SignChangeConstruction::new(0.0, &TrigPolynomial::cos(1.0), q0, p).is_ok());
    }

    #[test]
    fn u_solves_the_fiber_ode() {
        let c = SignChangeConstruction::new(
            0.0,
            &TrigPolynomial::cos(1.0),
            C64::new(0.0, 0.3),
            SignChangeParams::default(),
        )
        .unwrap();
        for xi in [0.5, 2.0, 10.0] {
            let r = c.fiber_residual(xi);
            assert!(r < 1e-8, "xi = {xi}: {r}");
        }
    }

    #[test]
    fn negative_mean_uses_the_mirrored_construction() {
        let b = TrigPolynomial::real_constant(-0.3).add(&TrigPolynomial::cos(1.0));
        let c = SignChangeConstruction::new(0.5, &b, C64::new(0.0, 0.3), SignChangeParams::default()).unwrap();
        assert_eq!(c.minimum.direction, -1);
        assert!(c.minimum.value < 0.0);
        let r = c.fiber_residual(3.0);
        assert!(r < 1e-8, "{r} {:?}", c.minimum);
        let (_, fit) = c.slope_fit(Exec::Sequential);
        assert!((-0.6..=-0.4).contains(&fit.slope), "{fit:?}");
    }

    #[test]
    fn cosine_report() {
        let (_, r) =
            sign_change_construction(0.0, &TrigPolynomial::cos(1.0), C64::new(0.0, 0.3), SignChangeParams::default())
                .unwrap();
        assert!((r.minimum.value + 2.0).abs() < 1e-12);
        assert!(r.ode_residual < 1e-5, "{}", r.ode_residual);
        assert!(r.slope_in_band, "{:?}", r.slope);
        assert!(r.f_membership.consistent, "{:?} {:?}", r.f_membership.k_axis, r.f_membership.xi_axis);
    }
}
