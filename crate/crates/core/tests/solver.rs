use std::f64::consts::TAU;

use ghcyl::exec::Exec;
use ghcyl::oracles::random_fiber;
use ghcyl::solver::{
    solve_const, solve_periodic_ode, solve_tube, solve_tube_with, solve_via_reduction, Branch, BranchUsed,
    PeriodicOdeProblem,
};
use ghcyl::spectral::{CylinderGrid, GridFunction};
use ghcyl::symbols::{OperatorSpec, TrigPolynomial, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const M: usize = 256;

/// Derivative of the trigonometric interpolant of periodic samples, by a
/// direct DFT.
fn spectral_derivative(u: &[C64]) -> Vec<C64> {
    let m = u.len();
    let coeffs: Vec<(i64, C64)> = (0..m as i64)
        .map(|k| {
            let k = if k >= m as i64 / 2 { k - m as i64 } else { k };
            let c: C64 = u
                .iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, -TAU * (k * j as i64) as f64 / m as f64))
                .sum();
            (k, c / m as f64)
        })
        .collect();
    (0..m)
        .map(|j| {
            let t = TAU * j as f64 / m as f64;
            coeffs
                .iter()
                .filter(|(k, _)| k.unsigned_abs() as usize != m / 2)
                .map(|&(k, c)| C64::new(0.0, k as f64) * c * C64::from_polar(1.0, k as f64 * t))
                .sum()
        })
        .collect()
}

fn forcing(grid: CylinderGrid, k: i64, width: f64) -> GridFunction {
    GridFunction::from_fn(grid, |t, x| C64::from_polar((-(x / width).powi(2) / 2.0).exp(), k as f64 * t))
}

fn small_trig(c: &[(i64, f64, f64)]) -> TrigPolynomial {
    TrigPolynomial::new(c.iter().map(|&(n, re, im)| (n, C64::new(re, im))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ode_residual_is_small(seed in any::<u64>()) {
        let (theta, g) = random_fiber(&mut ChaCha8Rng::seed_from_u64(seed));
        let prob = PeriodicOdeProblem::from_trig(theta.clone(), &g, M);
        let sol = solve_periodic_ode(&prob, Branch::Auto).unwrap();
        let du = spectral_derivative(&sol.u);
        let res = (0..M)
            .map(|j| {
                let t = TAU * j as f64 / M as f64;
                (du[j] + theta.eval(t) * sol.u[j] - g.eval(t)).norm()
            })
            .fold(0.0, f64::max);
        prop_assert!(res < 1e-6, "{}", res);
    }

    #[test]
    fn both_branches_agree(seed in any::<u64>()) {
        let (theta, g) = random_fiber(&mut ChaCha8Rng::seed_from_u64(seed));
        let prob = PeriodicOdeProblem::from_trig(theta, &g, M);
        let minus = solve_periodic_ode(&prob, Branch::SolMinus).unwrap();
        let plus = solve_periodic_ode(&prob, Branch::SolPlus).unwrap();
        prop_assume!(minus.conditioning > 1e-3 && plus.conditioning > 1e-3);
        prop_assert_eq!(minus.branch, BranchUsed::SolMinus);
        prop_assert_eq!(plus.branch, BranchUsed::SolPlus);
        let d = minus.u.iter().zip(&plus.u).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-8, "{}", d);
    }

    #[test]
    fn tube_matches_division_for_constant_coefficients(
        a in -1.0..1.0f64, b in 0.3..1.5f64, re in 0.2..1.0f64, im in -1.0..1.0f64, k in -3i64..=3,
    ) {
        let c = C64::new(re, im);
        let v = a / b * re + im;
        prop_assume!((v - v.round()).abs() > 0.1);
        let f = forcing(CylinderGrid::default(), k, 1.0);
        let (u1, r1) = solve_tube(&TrigPolynomial::real_constant(a), &TrigPolynomial::real_constant(b), &TrigPolynomial::constant(c), &f).unwrap();
        let (u2, _) = solve_const(&OperatorSpec::tube_const(a, b, c), &f).unwrap();
        prop_assert!(u1.max_diff(&u2) < 1e-8, "{}", u1.max_diff(&u2));
        prop_assert!(r1.residual_inf < 1e-5);
    }

    #[test]
    fn reduction_matches_direct_solve(
        a in prop::collection::vec((1i64..=2, -0.5..0.5f64, -0.5..0.5f64), 0..3),
        q in prop::collection::vec((-2i64..=2, -0.3..0.3f64, -0.3..0.3f64), 0..3),
        q0 in 0.3..1.0f64,
        k in -2i64..=2,
    ) {
        let a = small_trig(&a).real_part();
        let q = small_trig(&q).add(&TrigPolynomial::real_constant(q0));
        let f = forcing(CylinderGrid::default(), k, 1.0);
        let (u1, _) = solve_via_reduction(&a, &q, &f).unwrap();
        let (u2, _) = solve_tube(&a, &TrigPolynomial::zero(), &q, &f).unwrap();
        prop_assert!(u1.max_diff(&u2) < 1e-6, "{}", u1.max_diff(&u2));
    }
}

#[test]
fn execution_policies_are_bit_identical() {
    let b = TrigPolynomial::real_constant(1.0).add(&TrigPolynomial::cos(1.0));
    let q = TrigPolynomial::constant(C64::new(0.0, 0.3));
    let f = forcing(CylinderGrid::default(), 1, 1.0);
    let (u1, r1) = solve_tube_with(&TrigPolynomial::zero(), &b, &q, &f, Exec::Sequential).unwrap();
    let (u2, r2) = solve_tube_with(&TrigPolynomial::zero(), &b, &q, &f, Exec::Parallel).unwrap();
    assert_eq!(u1, u2);
    assert_eq!(r1.residual_inf.to_bits(), r2.residual_inf.to_bits());
}
