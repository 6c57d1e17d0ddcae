//! Unit-index (`alpha = 1`) law evaluated by the same inversion integral as
//! the driver. Outside the model's parameter range; kept as a reference
//! whose symmetric case is the standard Cauchy law, so the inversion and
//! quantile machinery can be checked against exact values.

use super::inversion::Inversion;
use super::{solve_quantile, StandardLaw};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct UnitIndexLaw {
    inversion: Inversion,
}

impl UnitIndexLaw {
    pub fn new(beta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "skewness must lie in [-1, 1]",
            });
        }
        Ok(Self {
            inversion: Inversion::new(1.0, beta),
        })
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        solve_quantile(self, q)
    }
}

impl StandardLaw for UnitIndexLaw {
    fn density(&self, z: f64) -> f64 {
        self.inversion.density(z)
    }

    fn lower_tail(&self, z: f64) -> f64 {
        self.inversion.cdf(z)
    }

    fn upper_tail(&self, z: f64) -> f64 {
        1.0 - self.inversion.cdf(z)
    }
}
