use crate::error::{Error, Result};

/// Location/scale map of the standardized stable driver `Z`:
/// `R_tau = mu * tau + sigma * tau^(1/alpha) * Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    /// Tail index in `(1, 2]`; `2` is the Gaussian boundary.
    pub alpha: f64,
    /// Skewness in `[-1, 1]`, ignored when `alpha == 2`.
    pub beta: f64,
    /// Scale per unit `tau^(1/alpha)`.
    pub sigma: f64,
    /// Drift per unit horizon.
    pub mu: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, mu: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must lie in [-1, 1]",
            });
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: sigma,
                reason: "must be positive and finite",
            });
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "must be finite",
            });
        }
        Ok(Self {
            alpha,
            beta,
            sigma,
            mu,
        })
    }

    /// Unit scale, zero drift.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    pub fn is_gaussian(&self) -> bool {
        self.alpha == 2.0
    }

    /// Skewness actually in effect (zero on the Gaussian boundary).
    pub fn effective_beta(&self) -> f64 {
        if self.is_gaussian() {
            0.0
        } else {
            self.beta
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "tail index must lie in (1, 2]",
        })
    }
}
