use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::exec::Exec;
use crate::symbols::{OperatorSpec, C64};

/// Smallest `|symbol|` per `k` on a uniform `ξ` grid, kept when below
/// `threshold`. Returns `(k, ξ, |symbol|)`.
pub fn brute_force_hits(
    op: &OperatorSpec,
    k_range: (i64, i64),
    xi_range: (f64, f64),
    step: f64,
    threshold: f64,
    exec: Exec,
) -> Vec<(i64, f64, f64)> {
    let steps = ((xi_range.1 - xi_range.0) / step).round() as usize;
    let ks = (k_range.1 - k_range.0 + 1).max(0) as usize;
    exec.map_range(ks, |i| {
        let k = k_range.0 + i as i64;
        let mut best: Option<(i64, f64, f64)> = None;
        for j in 0..=steps {
            let xi = xi_range.0 + j as f64 * step;
            let v = op.symbol_at(k, xi).map_or(f64::INFINITY, |s| s.norm());
            if v < threshold && best.map_or(true, |b| v < b.2) {
                best = Some((k, xi, v));
            }
        }
        best
    })
    .into_iter()
    .flatten()
    .collect()
}

/// `∂t + (a + ib)∂x + c` with `a, b ∈ {−2, …, 2}` and `Re c, Im c ∈ ½Z ∩ [−3, 3]`.
/// On this lattice a near-zero of the symbol within `10⁻²` is an exact zero.
pub fn random_lattice_first_order(rng: &mut ChaCha8Rng) -> OperatorSpec {
    let a = f64::from(rng.gen_range(-2i32..=2));
    let b = f64::from(rng.gen_range(-2i32..=2));
    let c = C64::new(0.5 * f64::from(rng.gen_range(-6i32..=6)), 0.5 * f64::from(rng.gen_range(-6i32..=6)));
    OperatorSpec::tube_const(a, b, c)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;

    #[test]
    fn finds_the_known_zero() {
        let op = OperatorSpec::tube_const(1.0, 1.0, C64::new(1.0, 0.0));
        let hits = brute_force_hits(&op, (-3, 3), (-5.0, 5.0), 1e-3, 1e-2, Exec::Sequential);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, -1);
        assert!((hits[0].1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lattice_operators_are_deterministic() {
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            assert_eq!(random_lattice_first_order(&mut r1), random_lattice_first_order(&mut r2));
        }
    }
}
