//! Runs every oracle against the rest of the crate with seeded inputs.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::calculus::{fd_derivative, reciprocal_derivative, rk_ode_oracle, RK_STEPS};
use super::combinatorics::{
    check_delta_identity, check_delta_identity_exact, check_exp_bound, check_factorial_bound, enumerate_delta,
    faa_di_bruno_exp, partition_count, rational,
};
use crate::counterexamples::laplace_lower_bound_check;
use crate::solver::{solve_periodic_ode, Branch, PeriodicOdeProblem};
use crate::symbols::{TrigPolynomial, C64};

/// Grid size for the ODE comparison; `RK_STEPS` must be a multiple.
pub const ODE_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSuite {
    pub seed: u64,
    pub checks: Vec<LemmaCheck>,
    pub all_passed: bool,
}

fn check(name: &str, cases: usize, max_error: f64, tolerance: f64) -> LemmaCheck {
    LemmaCheck { name: name.into(), passed: max_error <= tolerance, cases, max_error, tolerance }
}

/// Count of failures as an error measure, for checks that are pass/fail.
fn boolean(name: &str, results: impl IntoIterator<Item = bool>) -> LemmaCheck {
    let (mut cases, mut failed) = (0, 0);
    for ok in results {
        cases += 1;
        failed += usize::from(!ok);
    }
    check(name, cases, failed as f64, 0.0)
}

fn random_trig(rng: &mut ChaCha8Rng, max_freq: i64, amp: f64) -> TrigPolynomial {
    TrigPolynomial::new((-max_freq..=max_freq).filter(|&n| n != 0).map(|n| {
        let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (amp / max_freq as f64);
        (n, c)
    }))
}

/// Random `(θ, g)` with `Re θ₀` bounded away from zero, so `θ₀ ∉ iZ`.
pub fn random_fiber(rng: &mut ChaCha8Rng) -> (TrigPolynomial, TrigPolynomial) {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let theta0 = C64::new(sign * rng.gen_range(0.2..1.5), rng.gen_range(-3.0..3.0));
    let theta = random_trig(rng, 3, 1.0).add(&TrigPolynomial::constant(theta0));
    let g0 = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let g = random_trig(rng, 4, 1.0).add(&TrigPolynomial::constant(g0));
    (theta, g)
}

/// Max deviation between `solve_periodic_ode` and RK4 seeded at `u(0)`.
pub fn ode_vs_rk(theta: &TrigPolynomial, g: &TrigPolynomial) -> f64 {
    let prob = PeriodicOdeProblem::from_trig(theta.clone(), g, ODE_GRID);
    let Ok(sol) = solve_periodic_ode(&prob, Branch::Auto) else {
        return f64::INFINITY;
    };
    let traj = rk_ode_oracle(|t| theta.eval(t), |t| g.eval(t), sol.u[0], RK_STEPS);
    let stride = RK_STEPS / ODE_GRID;
    let interior = (0..ODE_GRID).map(|j| (sol.u[j] - traj[j * stride]).norm()).fold(0.0, f64::max);
    interior.max((sol.u[0] - traj[RK_STEPS]).norm())
}

pub fn run_suite(seed: u64) -> LemmaSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    checks.push(boolean(
        "delta_counts_match_partition_numbers",
        (1..=20).map(|n| enumerate_delta(n).len() as u64 == partition_count(n)),
    ));

    let rs = [rational(-1, 2), rational(1, 1), rational(2, 1), rational(7, 3)];
    checks.push(boolean(
        "delta_identity_exact",
        (1..=12).flat_map(|n| rs.iter().map(move |r| check_delta_identity_exact(n, r).equal)),
    ));
    let floats: Vec<f64> = (0..40).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let worst = floats
        .iter()
        .flat_map(|&r| (1..=12).map(move |n| check_delta_identity(n, r)))
        .map(|d| (d.lhs - d.rhs).abs())
        .fold(0.0, f64::max);
    checks.push(check("delta_identity_float", floats.len() * 12, worst, 1e-9));

    checks.push(boolean(
        "factorial_bound",
        (1..=14)
            .flat_map(enumerate_delta)
            .flat_map(|t| [1.0, 1.25, 1.5, 2.0, 3.0].into_iter().map(move |s| check_factorial_bound(&t, s))),
    ));

    let samples: Vec<(f64, f64, f64, u32)> = (0..100_000)
        .map(|_| (rng.gen_range(-1e3..1e3), rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0), rng.gen_range(0..=20)))
        .collect();
    checks
        .push(boolean("exp_bound", samples.iter().map(|&(x, l, mu, s)| check_exp_bound(x, l, mu, s).unwrap_or(false))));

    let mut faa_err = 0.0f64;
    let mut faa_cases = 0;
    for _ in 0..20 {
        let f = random_trig(&mut rng, 2, 0.8);
        for n in 1..=4 {
            let ts: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..TAU)).collect();
            let exact: Vec<C64> = ts.iter().map(|&t| faa_di_bruno_exp(&f, n, t)).collect();
            let scale = exact.iter().map(|v| v.norm()).fold(f64::MIN_POSITIVE, f64::max);
            for (&t, e) in ts.iter().zip(&exact) {
                let fd = fd_derivative(|s| f.eval(s).exp(), n, t, 0.02, 6);
                faa_err = faa_err.max((fd - e).norm() / scale);
                faa_cases += 1;
            }
        }
    }
    checks.push(check("faa_di_bruno_vs_finite_differences", faa_cases, faa_err, 1e-4));

    let mut rec_err = 0.0f64;
    let mut rec_cases = 0;
    for trial in 0..20 {
        let g = if trial == 0 {
            TrigPolynomial::new([(0, C64::new(3.0, 0.0)), (1, C64::new(1.0, 0.0))])
        } else {
            let c0 = C64::from_polar(rng.gen_range(2.0..3.0), rng.gen_range(0.0..TAU));
            random_trig(&mut rng, 2, 1.0).add(&TrigPolynomial::constant(c0))
        };
        for n in 1..=5u32 {
            let ts: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..TAU)).collect();
            let exact: Vec<C64> =
                ts.iter().map(|&t| reciprocal_derivative(&g, n, t).unwrap_or(C64::new(f64::NAN, 0.0))).collect();
            let scale = exact.iter().map(|v| v.norm()).fold(f64::MIN_POSITIVE, f64::max);
            for (&t, e) in ts.iter().zip(&exact) {
                let fd = fd_derivative(|s| 1.0 / g.eval(s), n as usize, t, 0.02, 6);
                let err = (fd - e).norm() / scale;
                rec_err = rec_err.max(if err.is_nan() { f64::INFINITY } else { err });
                rec_cases += 1;
            }
        }
    }
    checks.push(check("reciprocal_derivative_vs_finite_differences", rec_cases, rec_err, 1e-5));

    let closed = {
        let prob =
            PeriodicOdeProblem::from_trig(TrigPolynomial::real_constant(1.0), &TrigPolynomial::cos(1.0), ODE_GRID);
        match solve_periodic_ode(&prob, Branch::Auto) {
            Ok(sol) => sol
                .u
                .iter()
                .enumerate()
                .map(|(j, u)| {
                    let t = TAU * j as f64 / ODE_GRID as f64;
                    (u - C64::new((t.cos() + t.sin()) / 2.0, 0.0)).norm()
                })
                .fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    };
    checks.push(check("ode_closed_form", ODE_GRID, closed, 1e-8));

    let rk_err = (0..50)
        .map(|_| {
            let (theta, g) = random_fiber(&mut rng);
            ode_vs_rk(&theta, &g)
        })
        .fold(0.0, f64::max);
    checks.push(check("ode_vs_rk4", 50, rk_err, 1e-6));

    let lambdas = [1.0, 10.0, 100.0, 1e3, 1e4];
    let laplace = [
        laplace_lower_bound_check(|s| (s - PI).powi(2), PI, 0.5, &lambdas),
        laplace_lower_bound_check(|s| (s - PI).powi(4), PI, 0.5, &lambdas),
        laplace_lower_bound_check(|s| 1.0 - s.cos(), 0.0, 0.5, &lambdas),
    ];
    checks.push(boolean("laplace_lower_bound", laplace.iter().map(|r| r.as_ref().is_ok_and(|r| r.all_hold))));

    let all_passed = checks.iter().all(|c| c.passed);
    LemmaSuite { seed, checks, all_passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let s = run_suite(7);
        for c in &s.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(s.all_passed);
    }

    #[test]
    fn suite_is_deterministic() {
        assert_eq!(run_suite(3), run_suite(3));
    }
}
