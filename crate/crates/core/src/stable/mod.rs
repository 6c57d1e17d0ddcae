//! Numerics for the standardized stable driver `Z` with characteristic
//! function `exp(-|u|^alpha (1 - i beta tan(pi alpha / 2) sign u))`.
//!
//! Near the center (`|z| < 1`) the density and distribution function come
//! from direct inversion of the characteristic function; elsewhere from the
//! Zolotarev angular integral, which keeps relative accuracy deep in the
//! tails. The Gaussian boundary `alpha = 2` is `N(0, 2)` and uses closed
//! forms unless disabled with [`StableDriver::with_closed_forms`].

mod inversion;
mod moments;
pub mod oracle;
mod params;
pub mod sample;
mod zolotarev;

use core::f64::consts::{PI, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;

pub use moments::{MomentConstants, TailConstants};
pub use params::StableParams;
pub use sample::{sample, StableSampler};

use crate::error::{Error, Result};
use crate::quad::QuadConfig;
use crate::roots::{brent, expand_bracket};
use crate::special::{gamma, norm_cdf, norm_pdf, norm_quantile};
use inversion::Inversion;
use zolotarev::Zolotarev;

/// Below this `|z|` the inversion integral is used.
pub(crate) const CORE: f64 = 1.0;

/// A univariate law with a continuous, strictly increasing distribution
/// function, as needed by the quantile solver.
pub trait StandardLaw {
    fn density(&self, z: f64) -> f64;
    /// `P(Z <= z)`, accurate in relative terms for `z` in the left tail.
    fn lower_tail(&self, z: f64) -> f64;
    /// `P(Z > z)`, accurate in relative terms for `z` in the right tail.
    fn upper_tail(&self, z: f64) -> f64;
}

/// Solves `F(z) = q`, working on whichever tail keeps relative precision.
pub fn solve_quantile<L: StandardLaw + ?Sized>(law: &L, q: f64) -> Result<f64> {
    check_probability(q)?;
    let h = |z: f64| {
        if q < 0.5 {
            law.lower_tail(z) - q
        } else {
            (1.0 - q) - law.upper_tail(z)
        }
    };
    let (lo, hi) = expand_bracket(h, 0.0, -1.0, 1.0, "quantile bracket")?;
    let z = brent(h, lo, hi, 1e-15, "quantile")?;
    // Newton polish with the density.
    let r0 = h(z);
    let d = law.density(z);
    if d > 0.0 {
        let z1 = z - r0 / d;
        if z1.is_finite() && h(z1).abs() < r0.abs() {
            return Ok(z1);
        }
    }
    Ok(z)
}

pub(crate) fn check_probability(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "probability must lie in (0, 1)",
        })
    }
}

fn check_finite(z: f64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "z",
            value: z,
            reason: "argument must be finite",
        })
    }
}

/// Evaluator for the standardized driver of a [`StableParams`].
///
/// Cheap to construct and `Copy`; holds no caches.
#[derive(Debug, Clone, Copy)]
pub struct StableDriver {
    alpha: f64,
    beta: f64,
    quad: QuadConfig,
    closed_forms: bool,
    right: Zolotarev,
    left: Zolotarev,
    inversion: Inversion,
}

impl StableDriver {
    pub fn new(params: &StableParams) -> Self {
        let alpha = params.alpha;
        let beta = params.effective_beta();
        Self {
            alpha,
            beta,
            quad: QuadConfig::default(),
            closed_forms: true,
            right: Zolotarev::new(alpha, beta),
            left: Zolotarev::new(alpha, -beta),
            inversion: Inversion::new(alpha, beta),
        }
    }

    /// Tolerances for the outer integrals (moments, tail means).
    pub fn with_tolerance(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    /// Disables the `N(0, 2)` shortcuts at `alpha = 2` so the general
    /// integral path can be validated against them.
    pub fn with_closed_forms(mut self, enabled: bool) -> Self {
        self.closed_forms = enabled;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn quad(&self) -> &QuadConfig {
        &self.quad
    }

    fn gaussian(&self) -> bool {
        self.closed_forms && self.alpha == 2.0
    }

    pub fn pdf(&self, z: f64) -> Result<f64> {
        check_finite(z)?;
        Ok(self.density(z))
    }

    pub fn cdf(&self, z: f64) -> Result<f64> {
        check_finite(z)?;
        Ok(self.lower_tail(z))
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        check_probability(q)?;
        if self.gaussian() {
            return Ok(SQRT_2 * norm_quantile(q));
        }
        solve_quantile(self, q)
    }

    /// Density at the mode-neighbourhood center, `f_Z(0)`.
    pub fn density_at_zero(&self) -> f64 {
        let zol = Zolotarev::new(self.alpha, self.beta);
        let zeta = -self.beta * (PI * self.alpha / 2.0).tan();
        gamma(1.0 + 1.0 / self.alpha) * zol.theta0().cos()
            / (PI * (1.0 + zeta * zeta).powf(0.5 / self.alpha))
    }

    /// Median absolute deviation of `Z` about its median.
    pub fn mad(&self) -> Result<f64> {
        let med = self.quantile(0.5)?;
        let h = |d: f64| self.lower_tail(med + d) - self.lower_tail(med - d) - 0.5;
        let (lo, hi) = expand_bracket(h, 0.0, 0.0, 1.0, "mad bracket")?;
        brent(h, lo.max(0.0), hi, 1e-14, "mad")
    }
}

impl StandardLaw for StableDriver {
    fn density(&self, z: f64) -> f64 {
        if self.gaussian() {
            return norm_pdf(z / SQRT_2) / SQRT_2;
        }
        if z.abs() < CORE {
            self.inversion.density(z)
        } else if z > 0.0 {
            self.right.density(z)
        } else {
            self.left.density(-z)
        }
    }

    fn lower_tail(&self, z: f64) -> f64 {
        if self.gaussian() {
            return norm_cdf(z / SQRT_2);
        }
        if z.abs() < CORE {
            self.inversion.cdf(z)
        } else if z > 0.0 {
            1.0 - self.right.survival(z)
        } else {
            self.left.survival(-z)
        }
    }

    fn upper_tail(&self, z: f64) -> f64 {
        if self.gaussian() {
            return norm_cdf(-z / SQRT_2);
        }
        if z.abs() < CORE {
            1.0 - self.inversion.cdf(z)
        } else if z > 0.0 {
            self.right.survival(z)
        } else {
            1.0 - self.left.survival(-z)
        }
    }
}

/// Density of `Z` at `z`.
pub fn stable_pdf(params: &StableParams, z: f64) -> Result<f64> {
    StableDriver::new(params).pdf(z)
}

/// Distribution function of `Z` at `z`.
pub fn stable_cdf(params: &StableParams, z: f64) -> Result<f64> {
    StableDriver::new(params).cdf(z)
}

/// `Q_Z(q)`.
pub fn stable_quantile(params: &StableParams, q: f64) -> Result<f64> {
    StableDriver::new(params).quantile(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn driver(alpha: f64, beta: f64) -> StableDriver {
        StableDriver::new(&StableParams::standard(alpha, beta).unwrap())
    }

    #[test]
    fn gaussian_boundary_values() {
        let d = driver(2.0, 0.0);
        assert!((d.pdf(0.0).unwrap() - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        assert!((d.quantile(0.05).unwrap() + 2.326_174_307_353_348_5).abs() < 1e-12);
        assert!((d.cdf(-2.326_174_307_353_348_5).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn symmetric_center() {
        let d = driver(1.5, 0.0);
        assert!((d.cdf(0.0).unwrap() - 0.5).abs() < 1e-13);
        assert!(d.quantile(0.5).unwrap().abs() < 1e-12);
        for &z in &[0.5, 1.0, 3.0] {
            let a = d.pdf(z).unwrap();
            let b = d.pdf(-z).unwrap();
            assert!((a - b).abs() < 1e-14, "z={z}");
        }
    }

    #[test]
    fn density_at_zero_formula_agrees_with_inversion() {
        for &(a, b) in &[(1.5, 0.0), (1.2, 0.5), (1.8, -0.7)] {
            let d = driver(a, b);
            let inv = Inversion::new(a, b).density(0.0);
            assert!((d.density_at_zero() - inv).abs() < 1e-12, "a={a} b={b}");
        }
    }

    #[test]
    fn far_right_limit() {
        let d = driver(1.5, 0.0);
        assert!((d.cdf(1e6).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_finite_and_bad_levels() {
        let d = driver(1.5, 0.0);
        assert!(d.pdf(f64::NAN).is_err());
        assert!(d.cdf(f64::INFINITY).is_err());
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
    }

    #[test]
    fn gaussian_mad() {
        // MAD of N(0, 2) is sqrt(2) * Phi^{-1}(3/4).
        let d = driver(2.0, 0.0);
        let exact = SQRT_2 * norm_quantile(0.75);
        assert!((d.mad().unwrap() - exact).abs() < 1e-12);
    }
}
