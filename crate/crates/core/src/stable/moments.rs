//! Tail means, trimmed and fractional moments of the driver.
//!
//! Everything is computed from the distribution function by layer-cake
//! identities, which keeps the integrands bounded; power-law tails go
//! through [`integrate_power_tail`].

use core::f64::consts::SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;

use super::{check_probability, StableDriver, StandardLaw, CORE};
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_points, integrate_power_tail};
use crate::special::{norm_abs_moment, norm_cdf, norm_pdf, norm_quantile};

/// Constants of the driver at tail level `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailConstants {
    pub q: f64,
    /// `Q_Z(q)`
    pub quantile: f64,
    /// `m_Z(q) = E[Z; Z <= Q_Z(q)] / q`
    pub tail_mean: f64,
    /// `c_q = |Q_Z(q)|`
    pub c_q: f64,
    /// `K_q = E[Z^2; |Z| <= c_q]`
    pub k_q: f64,
}

impl TailConstants {
    pub fn compute(driver: &StableDriver, q: f64) -> Result<Self> {
        let quantile = driver.quantile(q)?;
        let tail_mean = driver.tail_mean_at(q, quantile)?;
        let c_q = quantile.abs();
        let k_q = driver.trimmed_second_moment(c_q)?;
        Ok(Self {
            q,
            quantile,
            tail_mean,
            c_q,
            k_q,
        })
    }
}

/// Fractional-moment constants of the driver at order `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentConstants {
    pub p: f64,
    /// `c_{Z,p} = E|Z - EZ|^p`
    pub c_zp: f64,
    /// `d_{Z,p} = (E (-Z)_+^p)^(1/p)`
    pub d_zp: f64,
    /// `c_{N,p} = E|N|^p` for a standard normal.
    pub c_np: f64,
}

impl MomentConstants {
    pub fn compute(driver: &StableDriver, p: f64) -> Result<Self> {
        Ok(Self {
            p,
            c_zp: driver.abs_moment(p)?,
            d_zp: driver.neg_part_moment(p)?,
            c_np: norm_abs_moment(p),
        })
    }
}

impl StableDriver {
    fn check_order(&self, p: f64) -> Result<()> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "moment order must be positive",
            });
        }
        if p >= self.alpha {
            return Err(Error::MomentDivergence {
                p,
                alpha: self.alpha,
            });
        }
        Ok(())
    }

    /// `m_Z(q)`.
    pub fn tail_mean(&self, q: f64) -> Result<f64> {
        check_probability(q)?;
        let quantile = self.quantile(q)?;
        self.tail_mean_at(q, quantile)
    }

    fn tail_mean_at(&self, q: f64, quantile: f64) -> Result<f64> {
        if self.gaussian() {
            let x = norm_quantile(q);
            return Ok(-SQRT_2 * norm_pdf(x) / q);
        }
        // m = Q - (1/q) int_{-inf}^{Q} F(z) dz
        let split = quantile.min(-CORE);
        let tail = integrate_power_tail(|w| self.lower_tail(-w), -split, self.alpha, &self.quad)
            .require("tail mean (tail)")?;
        let body = if quantile > split {
            integrate_points(|z| self.lower_tail(z), &[split, quantile], &self.quad)
                .require("tail mean (body)")?
        } else {
            0.0
        };
        Ok(quantile - (tail + body) / q)
    }

    /// `K_q = E[Z^2; |Z| <= c_q]` with `c_q = |Q_Z(q)|`.
    pub fn truncated_second_moment(&self, q: f64) -> Result<f64> {
        let c = self.quantile(q)?.abs();
        self.trimmed_second_moment(c)
    }

    /// `E[Z^2; |Z| <= c]`.
    pub fn trimmed_second_moment(&self, c: f64) -> Result<f64> {
        if c == 0.0 {
            return Ok(0.0);
        }
        if self.gaussian() {
            let a = c / SQRT_2;
            return Ok(2.0 * ((2.0 * norm_cdf(a) - 1.0) - 2.0 * a * norm_pdf(a)));
        }
        let mut pts = [0.0; 5];
        let mut n = 0;
        for x in [-c, -CORE, 0.0, CORE, c] {
            if x >= -c && x <= c && (n == 0 || x > pts[n - 1]) {
                pts[n] = x;
                n += 1;
            }
        }
        integrate_points(|z| z * z * self.density(z), &pts[..n], &self.quad)
            .require("truncated second moment")
    }

    /// `c_{Z,p} = E|Z|^p` (the driver has zero mean for `alpha > 1`).
    pub fn abs_moment(&self, p: f64) -> Result<f64> {
        self.check_order(p)?;
        if self.gaussian() {
            return Ok(2f64.powf(0.5 * p) * norm_abs_moment(p));
        }
        if self.beta() == 0.0 {
            return Ok(2.0 * self.layer_cake(p, |z| self.upper_tail(z), "absolute moment")?);
        }
        let both = |z: f64| self.upper_tail(z) + self.lower_tail(-z);
        self.layer_cake(p, both, "absolute moment")
    }

    /// `d_{Z,p} = (E (-Z)_+^p)^(1/p)`.
    pub fn neg_part_moment(&self, p: f64) -> Result<f64> {
        Ok(self.shifted_neg_part(0.0, p)?.powf(1.0 / p))
    }

    /// `E[(b - Z)_+^p]`, the building block of drawdown norms with drift.
    pub fn shifted_neg_part(&self, b: f64, p: f64) -> Result<f64> {
        self.check_order(p)?;
        if self.gaussian() && b == 0.0 {
            return Ok(2f64.powf(0.5 * p) * 0.5 * norm_abs_moment(p));
        }
        self.layer_cake(p, |y| self.lower_tail(b - y), "negative-part moment")
    }

    /// `int_0^inf p y^(p-1) tail(y) dy` for a tail decaying like `y^-alpha`.
    fn layer_cake<T: Fn(f64) -> f64>(&self, p: f64, tail: T, what: &'static str) -> Result<f64> {
        // [0, 1] in u = y^p removes the y^(p-1) endpoint singularity.
        let body = integrate(|u: f64| tail(u.powf(1.0 / p)), 0.0, 1.0, &self.quad).require(what)?;
        let rest = integrate_power_tail(
            |y| p * y.powf(p - 1.0) * tail(y),
            1.0,
            self.alpha - p + 1.0,
            &self.quad,
        )
        .require(what)?;
        Ok(body + rest)
    }

    /// `E[Z]` recomputed from the two tails; zero up to quadrature error.
    pub fn mean(&self) -> Result<f64> {
        let right = self.layer_cake(1.0, |z| self.upper_tail(z), "mean (right)")?;
        let left = self.layer_cake(1.0, |z| self.lower_tail(-z), "mean (left)")?;
        Ok(right - left)
    }
}
