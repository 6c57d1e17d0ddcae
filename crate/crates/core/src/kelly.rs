//! Log-growth maximization under the one-step no-bankruptcy bound.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::roots::brent;

/// Expectation used for `g(f) = E log(1 + f X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KellyLaw {
    /// `Z` restricted to `|Z| <= c_q` and recentered so that `E X` is the
    /// excess drift: the q-trimmed law behind the small-signal expansion.
    #[default]
    Trimmed,
    /// The full law of `X` conditioned on `X >= -1` (simple-return reading).
    RuinTruncated,
}

impl KellyLaw {
    pub fn name(self) -> &'static str {
        match self {
            Self::Trimmed => "trimmed",
            Self::RuinTruncated => "ruin-truncated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KellyResult {
    pub f_star: f64,
    /// `1 / |VaR|`, infinite when the VaR is not positive.
    pub f_max: f64,
    /// Upper end of the feasible set actually searched.
    pub upper: f64,
    /// `E[X / (1 + f* X)]`.
    pub foc_residual: f64,
    /// `f*` sits on `upper`.
    pub binding: bool,
    /// `g(f*)`.
    pub growth: f64,
}

/// A finitely supported law: points with nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteLaw {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidParameter {
                name: "weights",
                value: weights.len() as f64,
                reason: "must match the number of points",
            });
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidParameter {
                name: "weights",
                value: total,
                reason: "must be nonnegative with a positive sum",
            });
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "points",
                value: f64::NAN,
                reason: "must be finite",
            });
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { points, weights })
    }

    /// Equal weights on a sample.
    pub fn empirical(sample: &[f64]) -> Result<Self> {
        Self::new(sample.to_vec(), alloc::vec![1.0; sample.len()])
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn min(&self) -> f64 {
        self.points.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn growth(&self, f: f64) -> f64 {
        self.expect(|x| (f * x).ln_1p())
    }

    /// `g(f1) - g(f2)`, accurate even when the two are close.
    pub fn growth_difference(&self, f1: f64, f2: f64) -> f64 {
        self.expect(|x| ((f1 - f2) * x / (1.0 + f2 * x)).ln_1p())
    }

    pub fn foc(&self, f: f64) -> f64 {
        self.expect(|x| x / (1.0 + f * x))
    }

    /// Maximizes `g` on `[0, min(f_max, -1/min X)]`.
    pub fn kelly(&self, f_max: f64) -> Result<KellyResult> {
        let upper = ruin_bound(f_max, self.min())?;
        let (f_star, binding) = maximize(|f| Ok(self.foc(f)), upper)?;
        Ok(KellyResult {
            f_star,
            f_max,
            upper,
            foc_residual: self.foc(f_star),
            binding,
            growth: self.growth(f_star),
        })
    }
}

/// Kelly fraction for an empirical sample of excess returns.
pub fn kelly_sample(excess: &[f64], f_max: f64) -> Result<KellyResult> {
    DiscreteLaw::empirical(excess)?.kelly(f_max)
}

/// Feasible upper end: the VaR bound, tightened so that `1 + f x_min >= 0`.
pub(crate) fn ruin_bound(f_max: f64, x_min: f64) -> Result<f64> {
    if !(f_max > 0.0) {
        return Err(Error::InvalidParameter {
            name: "f_max",
            value: f_max,
            reason: "must be positive",
        });
    }
    let upper = if x_min < 0.0 {
        f_max.min(-1.0 / x_min)
    } else {
        f_max
    };
    if !upper.is_finite() {
        return Err(Error::InvalidParameter {
            name: "f_max",
            value: f_max,
            reason: "unbounded feasible set; supply a finite cap",
        });
    }
    Ok(upper)
}

/// Root of the decreasing first-order condition `h` on `[0, upper]`.
///
/// Returns the maximizer and whether it sits on `upper`.
pub(crate) fn maximize<H: FnMut(f64) -> Result<f64>>(mut h: H, upper: f64) -> Result<(f64, bool)> {
    let h0 = h(0.0)?;
    if h0 <= 0.0 {
        return Ok((0.0, false));
    }
    // At the ruin bound the integrand may blow up; back off until finite.
    let mut hi = upper;
    let mut h_hi = h(hi)?;
    for shrink in [1e-12, 1e-9, 1e-6] {
        if h_hi.is_finite() {
            break;
        }
        hi = upper * (1.0 - shrink);
        h_hi = h(hi)?;
    }
    if !h_hi.is_finite() {
        return Err(Error::NonConcave);
    }
    if h_hi >= 0.0 {
        return Ok((upper, true));
    }
    let mut err = None;
    let f = brent(
        |f| match h(f) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        hi,
        1e-15 * hi,
        "Kelly first-order condition",
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok((f?, false))
}

/// Golden-section search for the maximizer of a unimodal function on
/// `[a, b]`. `diff(x, y)` returns `g(x) - g(y)`; computing the difference
/// directly rather than from two rounded values lets the search resolve the
/// maximizer to near machine precision.
pub fn golden_section_max<D: FnMut(f64, f64) -> f64>(mut diff: D, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    while (b - a).abs() > tol && c < d {
        if diff(c, d) >= 0.0 {
            b = d;
            d = c;
            c = b - INV_PHI * (b - a);
        } else {
            a = c;
            c = d;
            d = a + INV_PHI * (b - a);
        }
    }
    0.5 * (a + b)
}
