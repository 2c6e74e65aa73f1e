use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    Squared,
    Absolute,
    /// `ρ_τ(r) = r (τ - 1{r < 0})` on the residual `r = y - t`.
    Pinball { tau: f64 },
}

/// A pointwise loss `L(y, t)` with its Lipschitz constant in `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossFunction {
    kind: LossKind,
    lipschitz_constant: f64,
}

impl LossFunction {
    /// Squared loss. It is only Lipschitz on a bounded range: for outputs and
    /// predictions in `[-M, M]` the constant is `4M`.
    pub fn squared(output_bound: f64) -> Result<Self> {
        if !(output_bound.is_finite() && output_bound >= 0.0) {
            return Err(Error::input(format!(
                "output bound must be finite and >= 0, got {output_bound}"
            )));
        }
        Ok(LossFunction {
            kind: LossKind::Squared,
            lipschitz_constant: 4.0 * output_bound,
        })
    }

    pub fn absolute() -> Self {
        LossFunction {
            kind: LossKind::Absolute,
            lipschitz_constant: 1.0,
        }
    }

    pub fn pinball(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::input(format!("pinball tau must lie in (0, 1), got {tau}")));
        }
        Ok(LossFunction {
            kind: LossKind::Pinball { tau },
            lipschitz_constant: tau.max(1.0 - tau),
        })
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.lipschitz_constant
    }

    pub fn is_squared(&self) -> bool {
        matches!(self.kind, LossKind::Squared)
    }

    /// `L(y, t)`.
    #[inline]
    pub fn value(&self, y: f64, t: f64) -> f64 {
        let r = y - t;
        match self.kind {
            LossKind::Squared => r * r,
            LossKind::Absolute => r.abs(),
            LossKind::Pinball { tau } => {
                if r >= 0.0 {
                    tau * r
                } else {
                    (tau - 1.0) * r
                }
            }
        }
    }

    /// A subgradient of `t ↦ L(y, t)`.
    ///
    /// At a zero residual the `τ - 1` branch of `ρ_τ` is taken (giving
    /// `1 - τ` in `t`); the absolute loss uses the matching branch `+1`, so
    /// that `2 · pinball(0.5)` and the absolute loss share subgradients.
    #[inline]
    pub fn derivative(&self, y: f64, t: f64) -> f64 {
        let r = y - t;
        match self.kind {
            LossKind::Squared => -2.0 * r,
            LossKind::Absolute => {
                if r > 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
            LossKind::Pinball { tau } => {
                if r > 0.0 {
                    -tau
                } else {
                    1.0 - tau
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        let abs = LossFunction::absolute();
        assert_eq!(abs.value(1.0, 0.0), 1.0);
        assert_eq!(abs.value(-1.0, 0.0), 1.0);
        let pin = LossFunction::pinball(0.9).unwrap();
        assert!((pin.value(1.0, 0.0) - 0.9).abs() < 1e-15);
        assert!((pin.value(-1.0, 0.0) - 0.1).abs() < 1e-15);
        let sq = LossFunction::squared(1.0).unwrap();
        assert_eq!(sq.value(3.0, 1.0), 4.0);
        assert_eq!(sq.lipschitz_constant(), 4.0);
    }

    #[test]
    fn pinball_half_is_half_absolute() {
        let pin = LossFunction::pinball(0.5).unwrap();
        let abs = LossFunction::absolute();
        for r in [-3.0, -0.5, 0.0, 0.25, 7.0] {
            assert_eq!(pin.value(r, 0.0), abs.value(r, 0.0) / 2.0);
            assert_eq!(2.0 * pin.derivative(r, 0.0), abs.derivative(r, 0.0));
        }
    }

    #[test]
    fn lipschitz_constants() {
        assert_eq!(LossFunction::absolute().lipschitz_constant(), 1.0);
        assert_eq!(LossFunction::pinball(0.2).unwrap().lipschitz_constant(), 0.8);
        assert_eq!(LossFunction::pinball(0.7).unwrap().lipschitz_constant(), 0.7);
    }

    #[test]
    fn rejects_bad_tau() {
        assert!(LossFunction::pinball(0.0).is_err());
        assert!(LossFunction::pinball(1.0).is_err());
        assert!(LossFunction::pinball(f64::NAN).is_err());
        assert!(LossFunction::squared(-1.0).is_err());
    }
}
