use serde::Serialize;

use crate::{Error, Result};

/// Gevrey cutoff built from `h(s) = exp(−s^{−1/(order−1)})`.
///
/// Equals 1 exactly on `plateau`, 0 exactly outside the open `support`,
/// and glues the two with `h(s)/(h(s) + h(1−s))` on each side. Either end
/// may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GevreyCutoff {
    pub order: f64,
    pub support: (f64, f64),
    pub plateau: (f64, f64),
}

impl GevreyCutoff {
    pub fn new(order: f64, support: (f64, f64), plateau: (f64, f64)) -> Result<Self> {
        if !(order > 1.0) {
            return Err(Error::Precondition(format!("cutoff order must exceed 1, got {order}")));
        }
        let ok = support.0 < plateau.0 && plateau.0 <= plateau.1 && plateau.1 < support.1
            || support.0 < plateau.0 && plateau.1 == f64::INFINITY && support.1 == f64::INFINITY;
        if !ok {
            return Err(Error::Precondition(format!(
                "plateau {plateau:?} must sit strictly inside support {support:?}"
            )));
        }
        Ok(Self { order, support, plateau })
    }

    /// Symmetric bump: support `center ± delta`, plateau `center ± delta/2`.
    pub fn bump(order: f64, center: f64, delta: f64) -> Result<Self> {
        Self::new(order, (center - delta, center + delta), (center - delta / 2.0, center + delta / 2.0))
    }

    /// Vanishes on `(−∞, 0]`, equals 1 on `[1, ∞)`.
    pub fn half_line(order: f64) -> Result<Self> {
        Self::new(order, (0.0, f64::INFINITY), (1.0, f64::INFINITY))
    }

    fn h(&self, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else {
            (-s.powf(-1.0 / (self.order - 1.0))).exp()
        }
    }

    /// 0 at `s ≤ 0`, 1 at `s ≥ 1`.
    fn step(&self, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else if s >= 1.0 {
            1.0
        } else {
            let (l, r) = (self.h(s), self.h(1.0 - s));
            l / (l + r)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support;
        let (p_lo, p_hi) = self.plateau;
        if x <= lo || x >= hi {
            0.0
        } else if x >= p_lo && x <= p_hi {
            1.0
        } else if x < p_lo {
            self.step((x - lo) / (p_lo - lo))
        } else {
            self.step((hi - x) / (hi - p_hi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_plateau_and_support() {
        let phi = GevreyCutoff::bump(2.0, 1.0, 0.4).unwrap();
        for i in 0..=4000 {
            let x = -0.5 + 3.0 * i as f64 / 4000.0;
            let v = phi.eval(x);
            assert!((0.0..=1.0).contains(&v));
            if (0.8..=1.2).contains(&x) {
                assert_eq!(v, 1.0);
            }
            if !(0.6..1.4).contains(&x) {
                assert_eq!(v, 0.0);
            }
        }
        let psi = GevreyCutoff::half_line(1.5).unwrap();
        assert_eq!(psi.eval(-3.0), 0.0);
        assert_eq!(psi.eval(1.0), 1.0);
        assert_eq!(psi.eval(1e9), 1.0);
        assert!((psi.eval(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GevreyCutoff::bump(1.0, 0.0, 1.0).is_err());
        assert!(GevreyCutoff::new(2.0, (0.0, 1.0), (0.5, 1.5)).is_err());
    }
}
