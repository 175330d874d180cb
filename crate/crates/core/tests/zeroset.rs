use ghcyl::exec::Exec;
use ghcyl::oracles::{brute_force_hits, random_lattice_first_order};
use ghcyl::symbols::{ComplexPolynomial, OperatorSpec, RealPolynomial, C64};
use ghcyl::zeroset::{count_roots, find_zeros, find_zeros_with, real_roots, sturm_sequence};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Monic polynomial with the given roots.
fn from_roots(roots: &[f64]) -> RealPolynomial {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (i, &v) in c.iter().enumerate() {
            next[i + 1] += v;
            next[i] -= r * v;
        }
        c = next;
    }
    RealPolynomial::new(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sturm_count_matches_isolated_roots(roots in prop::collection::btree_set(-20i32..20, 1..6), shift in 0.0..1.0f64) {
        let roots: Vec<f64> = roots.into_iter().map(|r| f64::from(r) * 0.5 + shift).collect();
        let p = from_roots(&roots);
        let found = real_roots(&p);
        let bound = p.cauchy_bound() + 1.0;
        prop_assert_eq!(found.len(), count_roots(&sturm_sequence(&p), -bound, bound));
        prop_assert_eq!(found.len(), roots.len());
        for (f, r) in found.iter().zip(&roots) {
            prop_assert!((f - r).abs() < 1e-8);
        }
    }

    #[test]
    fn split_witnesses_are_zeros(p in prop::collection::vec(-3.0..3.0f64, 2..5), q in prop::collection::vec(-3i32..3, 1..4)) {
        let p = ComplexPolynomial::from_real(&p);
        let q: Vec<f64> = q.into_iter().map(f64::from).collect();
        let op = OperatorSpec::const_split(p, ComplexPolynomial::from_real(&q));
        if let Ok(search) = find_zeros(&op, 20) {
            for w in &search.witnesses {
                prop_assert!(op.symbol_at(w.k, w.xi).unwrap().norm() <= 1e-8, "{:?}", w);
            }
        }
    }

    #[test]
    fn first_order_witnesses_are_zeros(c1 in (-2.0..2.0f64, -2.0..2.0f64), c2 in (-2.0..2.0f64, -2.0..2.0f64), c3 in (-3.0..3.0f64, -3.0..3.0f64)) {
        let op = OperatorSpec::first_order_t(C64::new(c1.0, c1.1), C64::new(c2.0, c2.1), C64::new(c3.0, c3.1));
        let search = find_zeros(&op, 30).unwrap();
        for w in &search.witnesses {
            prop_assert!(op.symbol_at(w.k, w.xi).unwrap().norm() <= 1e-8, "{:?}", w);
        }
    }

    #[test]
    fn brute_force_agrees_with_closed_form(seed in any::<u64>()) {
        let op = random_lattice_first_order(&mut ChaCha8Rng::seed_from_u64(seed));
        let search = find_zeros(&op, 50).unwrap();
        let xi_max = 60.0;
        let hits = brute_force_hits(&op, (-50, 50), (-xi_max, xi_max), 1e-3, 1e-2, Exec::Parallel);
        let near: Vec<_> = search.witnesses.iter().filter(|w| w.k.abs() <= 50 && w.xi.abs() <= xi_max).collect();
        for h in &hits {
            prop_assert!(near.iter().any(|w| w.k == h.0 && (w.xi - h.1).abs() < 1e-2), "{:?} unexplained in {:?}", h, op);
        }
        for w in &near {
            prop_assert!(hits.iter().any(|h| h.0 == w.k), "{:?} missed by the grid in {:?}", w, op);
        }
    }
}

#[test]
fn execution_policies_agree() {
    let op = OperatorSpec::const_split(
        ComplexPolynomial::from_real(&[0.0, 0.0, 1.0]),
        ComplexPolynomial::from_real(&[0.0, -1.0]),
    );
    let a = find_zeros_with(&op, 40, Exec::Sequential).unwrap();
    let b = find_zeros_with(&op, 40, Exec::Parallel).unwrap();
    assert_eq!(a, b);
    assert!(a.witnesses.iter().any(|w| w.k == 4 && (w.xi - 2.0).abs() < 1e-12));
}

#[test]
fn lower_bound_is_schedule_independent() {
    use ghcyl::zeroset::{certify_lower_bound_with, LowerBoundOptions};
    let op = OperatorSpec::const_split(
        ComplexPolynomial::new(vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0), C64::new(1.0, 0.0)]),
        ComplexPolynomial::from_real(&[0.0, 0.0, 1.0]),
    );
    let opts = LowerBoundOptions::new(1.0, 40, 400);
    let a = certify_lower_bound_with(&op, opts, Exec::Sequential).unwrap();
    let b = certify_lower_bound_with(&op, opts, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}
