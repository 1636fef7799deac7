use serde::{Deserialize, Serialize};

use crate::complexes::grades::Bigrade;
use crate::error::{Error, Result};

/// The forward shift `(k, r) ↦ (a·k − b, c·r + d)` of J.
///
/// Valid when `0 < a ≤ 1`, `b ≥ 0`, `c ≥ 1`, `d ≥ 0`: then `s(x) ≥ x` for
/// every `x` and `s` is monotone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineShift {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl AffineShift {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let s = AffineShift { a, b, c, d };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let AffineShift { a, b, c, d } = *self;
        if ![a, b, c, d].iter().all(|x| x.is_finite()) || !(a > 0.0 && a <= 1.0 && b >= 0.0 && c >= 1.0 && d >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "not a forward shift: need 0 < a <= 1, b >= 0, c >= 1, d >= 0, got ({a}, {b}, {c}, {d})"
            )));
        }
        Ok(())
    }

    pub fn identity() -> Self {
        AffineShift { a: 1.0, b: 0.0, c: 1.0, d: 0.0 }
    }

    /// `τ^δ(k, r) = (k − δ, r + δ)`.
    pub fn tau(delta: f64) -> Result<Self> {
        Self::new(1.0, delta, 1.0, delta)
    }

    /// `γ^{δ,c}(k, r) = (k − δ, c·r + δ)`.
    pub fn gamma(delta: f64, c: f64) -> Result<Self> {
        Self::new(1.0, delta, c, delta)
    }

    /// `κ^C(k, r) = (C·k, r)` for `0 < C ≤ 1`.
    pub fn kappa(ratio: f64) -> Result<Self> {
        Self::new(ratio, 0.0, 1.0, 0.0)
    }

    /// `τ^{slack} ∘ κ^{ratio}`.
    pub fn zeta(ratio: f64, slack: f64) -> Result<Self> {
        Ok(compose(Self::kappa(ratio)?, Self::tau(slack)?))
    }

    pub fn apply(&self, p: Bigrade) -> Bigrade {
        Bigrade::new(self.a * p.k - self.b, self.c * p.r + self.d)
    }
}

/// `second ∘ first`: apply `first`, then `second`.
pub fn compose(first: AffineShift, second: AffineShift) -> AffineShift {
    AffineShift {
        a: first.a * second.a,
        b: second.a * first.b + second.b,
        c: first.c * second.c,
        d: second.c * first.d + second.d,
    }
}

/// Whether `s1(x) ≤ s2(x)` in J for every `x` with `k > 0`.
pub fn shift_dominates(s1: &AffineShift, s2: &AffineShift) -> bool {
    s1.a >= s2.a && s1.b <= s2.b && s1.c <= s2.c && s1.d <= s2.d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn zeta_then_gamma() {
        let zeta = AffineShift::zeta(19.0 / 20.0, 1.0 / 100.0).unwrap();
        let g = AffineShift::gamma(6.0 / 100.0, 3.0).unwrap();
        let s = compose(zeta, g);
        assert!(close(s.a, 19.0 / 20.0) && close(s.b, 7.0 / 100.0) && close(s.c, 3.0) && close(s.d, 9.0 / 100.0));
        let p = s.apply(Bigrade::new(0.5, 0.1));
        assert!(close(p.k, 0.475 - 0.07) && close(p.r, 0.39));
    }

    #[test]
    fn validation() {
        assert!(AffineShift::new(1.5, 0.0, 1.0, 0.0).is_err());
        assert!(AffineShift::new(1.0, -0.1, 1.0, 0.0).is_err());
        assert!(AffineShift::new(1.0, 0.0, 0.5, 0.0).is_err());
        assert!(AffineShift::gamma(f64::NAN, 3.0).is_err());
        assert!(AffineShift::kappa(0.0).is_err());
    }

    #[test]
    fn domination() {
        let small = AffineShift::gamma(0.1, 1.0).unwrap();
        let big = AffineShift::gamma(0.2, 3.0).unwrap();
        assert!(shift_dominates(&small, &big));
        assert!(!shift_dominates(&big, &small));
        assert!(shift_dominates(&AffineShift::identity(), &small));
    }
}
