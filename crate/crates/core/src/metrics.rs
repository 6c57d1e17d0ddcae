//! Horizon propagation of risk and performance metrics.
//!
//! Every metric is evaluated twice: under the stable scale law
//! `sigma tau^(1/alpha)` and under a `sqrt(tau)` Gaussian surrogate whose
//! scale is matched to the stable law at the anchor horizon `tau0`. Losses
//! (VaR, ES, drawdowns) are reported as positive magnitudes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kelly::{maximize, ruin_bound, DiscreteLaw, KellyLaw, KellyResult};
use crate::quad::{integrate_points, integrate_power_tail, kronrod_nodes, QuadConfig};
use crate::roots::{brent, expand_bracket};
use crate::special::{norm_abs_moment, norm_neg_part_moment, norm_quantile, norm_tail_mean_magnitude};
use crate::stable::{StableDriver, StableParams, StandardLaw, CORE};

/// Horizon function such as the drift `mu_tau` or the riskless return `r_tau`.
#[derive(Debug, Clone, PartialEq)]
pub enum Drift {
    /// `rate * tau`.
    Linear(f64),
    /// Piecewise-linear interpolation of `(tau, value)` pairs.
    Tabulated { taus: Vec<f64>, values: Vec<f64> },
}

impl Default for Drift {
    fn default() -> Self {
        Self::Linear(0.0)
    }
}

impl Drift {
    pub fn tabulated(taus: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if taus.is_empty() || taus.len() != values.len() {
            return Err(Error::InvalidParameter {
                name: "drift table",
                value: taus.len() as f64,
                reason: "needs equally many horizons and values, at least one",
            });
        }
        if taus.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "drift table",
                value: f64::NAN,
                reason: "horizons must increase strictly and values be finite",
            });
        }
        Ok(Self::Tabulated { taus, values })
    }

    pub fn at(&self, tau: f64) -> Result<f64> {
        match self {
            Self::Linear(rate) => Ok(rate * tau),
            Self::Tabulated { taus, values } => {
                let (lo, hi) = (taus[0], taus[taus.len() - 1]);
                if !(tau >= lo && tau <= hi) {
                    return Err(Error::InvalidParameter {
                        name: "tau",
                        value: tau,
                        reason: "outside the tabulated drift",
                    });
                }
                let j = taus.partition_point(|t| *t < tau);
                if taus[j] == tau {
                    return Ok(values[j]);
                }
                let w = (tau - taus[j - 1]) / (taus[j] - taus[j - 1]);
                Ok(values[j - 1] + w * (values[j] - values[j - 1]))
            }
        }
    }
}

/// Location of returns `mu_tau` and the benchmark `r_tau` they are measured
/// against. For an active-return model `mu` is the active location `m_tau`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DriftSpec {
    pub mu: Drift,
    pub r: Drift,
}

impl DriftSpec {
    pub fn linear(mu: f64, r: f64) -> Self {
        Self {
            mu: Drift::Linear(mu),
            r: Drift::Linear(r),
        }
    }

    /// `mu_tau - r_tau`.
    pub fn excess(&self, tau: f64) -> Result<f64> {
        Ok(self.mu.at(tau)? - self.r.at(tau)?)
    }
}

/// Scale law applied past the infrared cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagation {
    /// `tau^(1/alpha)` at every horizon.
    #[default]
    Stable,
    /// `tau^(1/alpha)` up to `tau_IR`, then `sqrt(tau)` from there on.
    SqrtBeyondIr,
}

/// Which identity fixed the surrogate scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Matching {
    VarQuantile,
    EsTailMean,
    PNorm,
    DrawdownNorm,
    DrawdownQuantile,
}

impl Matching {
    pub fn name(self) -> &'static str {
        match self {
            Self::VarQuantile => "var-quantile",
            Self::EsTailMean => "es-tail-mean",
            Self::PNorm => "p-norm",
            Self::DrawdownNorm => "drawdown-p-norm",
            Self::DrawdownQuantile => "drawdown-quantile",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub tau: f64,
    /// Tail level `q` or moment order `p`.
    pub level: f64,
    pub levy: f64,
    pub gaussian: f64,
    /// `levy - gaussian`.
    pub bias: f64,
    /// Signed quantity behind `levy`: the return quantile for VaR, the tail
    /// mean for ES, the unclamped threshold for drawdown quantiles.
    pub signed_levy: f64,
    /// Surrogate scale per unit `sqrt(tau)`; `None` when it cannot be matched.
    pub matched_sigma_g: Option<f64>,
    pub matching: Matching,
    pub warnings: Vec<String>,
}

impl MetricValue {
    fn new(tau: f64, level: f64, levy: f64, gaussian: f64, matching: Matching) -> Self {
        Self {
            tau,
            level,
            levy,
            gaussian,
            bias: levy - gaussian,
            signed_levy: levy,
            matched_sigma_g: None,
            matching,
            warnings: Vec::new(),
        }
    }
}

/// Anchor-horizon constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorConstants {
    pub tau0: f64,
    pub alpha: f64,
    pub q: f64,
    /// `sigma tau0^(1/alpha) Q_Z(q)`, negative for `q < 1/2`.
    pub theta0_q: f64,
    /// `sigma tau0^(1/alpha) m_Z(q)`.
    pub xi0_q: f64,
    /// Quantile-matched surrogate scale.
    pub sigma_g_var: Option<f64>,
    /// Tail-mean-matched surrogate scale.
    pub sigma_g_es: f64,
    pub p: Option<f64>,
    /// `sigma tau0^(1/alpha) c_{Z,p}^(1/p)`.
    pub theta_p: Option<f64>,
    pub sigma_g_p: Option<f64>,
}

impl AnchorConstants {
    /// Closed-form VaR bias at `tau`.
    pub fn var_bias(&self, tau: f64) -> f64 {
        -self.theta0_q * exponent_gap(tau / self.tau0, self.alpha)
    }

    /// Closed-form ES bias at `tau`.
    pub fn es_bias(&self, tau: f64) -> f64 {
        -self.xi0_q * exponent_gap(tau / self.tau0, self.alpha)
    }

    /// Closed-form p-Sharpe (or p-information) bias for a mean excess return.
    pub fn ratio_bias(&self, tau: f64, excess: f64) -> Option<f64> {
        self.theta_p
            .map(|t| excess / t * inverse_exponent_gap(tau / self.tau0, self.alpha))
    }
}

/// `ratio^(1/alpha) - ratio^(1/2)`.
pub fn exponent_gap(ratio: f64, alpha: f64) -> f64 {
    ratio.powf(1.0 / alpha) - ratio.sqrt()
}

/// `ratio^(-1/alpha) - ratio^(-1/2)`.
pub fn inverse_exponent_gap(ratio: f64, alpha: f64) -> f64 {
    ratio.powf(-1.0 / alpha) - 1.0 / ratio.sqrt()
}

/// Stable horizon model `R_tau = mu_tau + sigma tau^(1/alpha) Z` anchored at `tau0`.
#[derive(Debug, Clone)]
pub struct RiskModel {
    params: StableParams,
    drift: DriftSpec,
    tau0: f64,
    window: Option<(f64, f64)>,
    propagation: Propagation,
    f_cap: f64,
    driver: StableDriver,
    normal: StableDriver,
    abs_moments: Vec<(f64, f64)>,
}

impl RiskModel {
    /// Linear drift `params.mu * tau`, zero benchmark.
    pub fn new(params: StableParams, tau0: f64) -> Result<Self> {
        check_tau(tau0)?;
        let normal = StableDriver::new(&StableParams::standard(2.0, 0.0)?);
        Ok(Self {
            drift: DriftSpec::linear(params.mu, 0.0),
            params,
            tau0,
            window: None,
            propagation: Propagation::Stable,
            f_cap: 1.0,
            driver: StableDriver::new(&params),
            normal,
            abs_moments: Vec::new(),
        })
    }

    pub fn with_drift(mut self, drift: DriftSpec) -> Self {
        self.drift = drift;
        self
    }

    /// Fitted window; horizons outside it carry a warning.
    pub fn with_window(mut self, tau_uv: f64, tau_ir: f64) -> Result<Self> {
        if !(tau_uv > 0.0 && tau_ir >= tau_uv) {
            return Err(Error::InvalidParameter {
                name: "window",
                value: tau_ir,
                reason: "need 0 < tau_uv <= tau_ir",
            });
        }
        self.window = Some((tau_uv, tau_ir));
        Ok(self)
    }

    pub fn with_propagation(mut self, propagation: Propagation) -> Self {
        self.propagation = propagation;
        self
    }

    /// Feasible-set cap used when the VaR is not positive.
    pub fn with_kelly_cap(mut self, f_cap: f64) -> Result<Self> {
        if !(f_cap > 0.0 && f_cap.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "f_cap",
                value: f_cap,
                reason: "must be positive and finite",
            });
        }
        self.f_cap = f_cap;
        Ok(self)
    }

    pub fn with_tolerance(mut self, quad: QuadConfig) -> Self {
        self.driver = self.driver.with_tolerance(quad);
        self.normal = self.normal.with_tolerance(quad);
        self.abs_moments.clear();
        self
    }

    /// Precomputes `E|Z|^p` for the given orders so repeated p-ratio and
    /// drawdown evaluations skip the nested quadrature.
    pub fn with_abs_moments(mut self, orders: &[f64]) -> Result<Self> {
        for &p in orders {
            if self.abs_moments.iter().all(|&(q, _)| q != p) {
                check_order(p)?;
                let c = self.driver.abs_moment(p)?;
                self.abs_moments.push((p, c));
            }
        }
        Ok(self)
    }

    fn abs_moment(&self, p: f64) -> Result<f64> {
        match self.abs_moments.iter().find(|&&(q, _)| q == p) {
            Some(&(_, c)) => Ok(c),
            None => self.driver.abs_moment(p),
        }
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    pub fn drift(&self) -> &DriftSpec {
        &self.drift
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn driver(&self) -> &StableDriver {
        &self.driver
    }

    /// Stable scale of `R_tau`.
    pub fn scale(&self, tau: f64) -> f64 {
        let a = self.params.alpha;
        match (self.propagation, self.window) {
            (Propagation::SqrtBeyondIr, Some((_, ir))) if tau > ir => {
                self.params.sigma * ir.powf(1.0 / a) * (tau / ir).sqrt()
            }
            _ => self.params.sigma * tau.powf(1.0 / a),
        }
    }

    fn anchor_scale(&self) -> f64 {
        self.params.sigma * self.tau0.powf(1.0 / self.params.alpha)
    }

    /// At `alpha = 2` the surrogate is the model itself; reuse the stable
    /// value so the bias is exactly zero rather than rounding noise.
    fn settle(&self, mut v: MetricValue) -> MetricValue {
        if self.params.is_gaussian() {
            v.gaussian = v.levy;
            v.bias = 0.0;
        }
        v
    }

    fn warnings(&self, tau: f64) -> Vec<String> {
        let mut w = Vec::new();
        if let Some((uv, ir)) = self.window {
            if tau < uv || tau > ir {
                w.push(format!("tau {tau} outside fitted window [{uv}, {ir}]; extrapolated"));
            }
            if self.propagation == Propagation::SqrtBeyondIr && tau > ir {
                w.push("sqrt(tau) propagation beyond tau_IR".into());
            }
        }
        if !(self.tau0 > 0.0) {
            w.push("anchor horizon invalid".into());
        }
        w
    }

    pub fn anchor(&self, q: f64, p: Option<f64>) -> Result<AnchorConstants> {
        check_level(q, 0.5)?;
        let s0 = self.anchor_scale();
        let qz = self.driver.quantile(q)?;
        let mz = self.driver.tail_mean(q)?;
        let zn = norm_quantile(q);
        let (theta_p, sigma_g_p) = match p {
            Some(p) => {
                let (t, g, _) = self.norm_anchor(p)?;
                (Some(t), Some(g))
            }
            None => (None, None),
        };
        Ok(AnchorConstants {
            tau0: self.tau0,
            alpha: self.params.alpha,
            q,
            theta0_q: s0 * qz,
            xi0_q: s0 * mz,
            sigma_g_var: (zn != 0.0).then(|| s0 * qz / (self.tau0.sqrt() * zn)),
            sigma_g_es: s0 * (-mz) / (self.tau0.sqrt() * norm_tail_mean_magnitude(q)),
            p,
            theta_p,
            sigma_g_p,
        })
    }

    /// `(Theta_p, sigma_G, c_{Z,p})` at the anchor.
    fn norm_anchor(&self, p: f64) -> Result<(f64, f64, f64)> {
        check_order(p)?;
        let c = self.abs_moment(p)?;
        let theta = self.anchor_scale() * c.powf(1.0 / p);
        let sigma_g = theta / (self.tau0.sqrt() * norm_abs_moment(p).powf(1.0 / p));
        Ok((theta, sigma_g, c))
    }

    /// Value-at-Risk `-Q_{R_tau}(q)`.
    pub fn var(&self, tau: f64, q: f64) -> Result<MetricValue> {
        check_tau(tau)?;
        check_level(q, 0.5)?;
        let mu = self.drift.mu.at(tau)?;
        let qz = self.driver.quantile(q)?;
        let signed = mu + self.scale(tau) * qz;
        let zn = norm_quantile(q);
        let mut warnings = self.warnings(tau);
        let (gaussian, sigma_g) = if zn != 0.0 {
            let sg = self.anchor_scale() * qz / (self.tau0.sqrt() * zn);
            (-mu - sg * tau.sqrt() * zn, Some(sg))
        } else {
            warnings.push("surrogate cannot be quantile-matched at the median".into());
            (-mu, None)
        };
        let mut v = MetricValue::new(tau, q, -signed, gaussian, Matching::VarQuantile);
        v.signed_levy = signed;
        v.matched_sigma_g = sigma_g;
        v.warnings = warnings;
        Ok(self.settle(v))
    }

    /// Expected shortfall `-E[R_tau | R_tau <= Q_{R_tau}(q)]`.
    pub fn es(&self, tau: f64, q: f64) -> Result<MetricValue> {
        check_tau(tau)?;
        check_level(q, 0.5)?;
        let mu = self.drift.mu.at(tau)?;
        let mz = self.driver.tail_mean(q)?;
        let mn = norm_tail_mean_magnitude(q);
        let signed = mu + self.scale(tau) * mz;
        let sg = self.anchor_scale() * (-mz) / (self.tau0.sqrt() * mn);
        let gaussian = -mu + sg * tau.sqrt() * mn;
        let mut v = MetricValue::new(tau, q, -signed, gaussian, Matching::EsTailMean);
        v.signed_levy = signed;
        v.matched_sigma_g = Some(sg);
        v.warnings = self.warnings(tau);
        Ok(self.settle(v))
    }

    /// p-Sharpe ratio `(mu_tau - r_tau) / (E|R_tau - E R_tau|^p)^(1/p)`.
    pub fn sharpe_p(&self, tau: f64, p: f64) -> Result<MetricValue> {
        check_tau(tau)?;
        let excess = self.drift.excess(tau)?;
        self.ratio_p(tau, p, excess)
    }

    /// p-information ratio of an active-return model: `m_tau` over the
    /// p-dispersion of `A_tau`, with `m_tau` taken from `drift.mu`.
    pub fn info_ratio_p(&self, tau: f64, p: f64) -> Result<MetricValue> {
        check_tau(tau)?;
        let m = self.drift.mu.at(tau)?;
        self.ratio_p(tau, p, m)
    }

    fn ratio_p(&self, tau: f64, p: f64, numerator: f64) -> Result<MetricValue> {
        let (theta, sigma_g, c) = self.norm_anchor(p)?;
        let levy = numerator / (self.scale(tau) * c.powf(1.0 / p));
        let gaussian = numerator / (sigma_g * tau.sqrt() * norm_abs_moment(p).powf(1.0 / p));
        debug_assert!(theta > 0.0);
        let mut v = MetricValue::new(tau, p, levy, gaussian, Matching::PNorm);
        v.matched_sigma_g = Some(sigma_g);
        v.warnings = self.warnings(tau);
        Ok(self.settle(v))
    }

    /// One-step drawdown norm `(E (-R_tau)_+^p)^(1/p)`, drift included.
    pub fn drawdown_p(&self, tau: f64, p: f64) -> Result<MetricValue> {
        check_tau(tau)?;
        check_order(p)?;
        let levy = self.stable_drawdown(self.drift.mu.at(tau)?, self.scale(tau), p)?;
        let sigma_g = self.drawdown_sigma_g(p)?;
        let gaussian = self.normal_drawdown(self.drift.mu.at(tau)?, sigma_g * tau.sqrt(), p)?;
        let mut v = MetricValue::new(tau, p, levy, gaussian, Matching::DrawdownNorm);
        v.matched_sigma_g = Some(sigma_g);
        v.warnings = self.warnings(tau);
        Ok(self.settle(v))
    }

    fn stable_drawdown(&self, mu: f64, s: f64, p: f64) -> Result<f64> {
        Ok(s * self.driver.shifted_neg_part(-mu / s, p)?.powf(1.0 / p))
    }

    /// `s (E (b - N)_+^p)^(1/p)` for a standard normal, via the `N(0, 2)` driver.
    fn normal_drawdown(&self, mu: f64, s: f64, p: f64) -> Result<f64> {
        let b = -mu / s;
        let m = if b == 0.0 {
            norm_neg_part_moment(p)
        } else {
            2f64.powf(-0.5 * p) * self.normal.shifted_neg_part(SQRT_2 * b, p)?
        };
        Ok(s * m.powf(1.0 / p))
    }

    /// Surrogate scale reproducing the drift-inclusive drawdown norm at `tau0`.
    fn drawdown_sigma_g(&self, p: f64) -> Result<f64> {
        let root_tau0 = self.tau0.sqrt();
        if self.params.is_gaussian() {
            return Ok(self.params.sigma * SQRT_2);
        }
        let mu0 = self.drift.mu.at(self.tau0)?;
        let s0 = self.anchor_scale();
        let target = self.stable_drawdown(mu0, s0, p)?;
        let guess = (s0 / root_tau0).ln();
        if mu0 == 0.0 {
            return Ok(target / (root_tau0 * norm_neg_part_moment(p).powf(1.0 / p)));
        }
        let mut err = None;
        let mut h = |u: f64| match self.normal_drawdown(mu0, u.exp() * root_tau0, p) {
            Ok(v) => v - target,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        };
        let (lo, hi) = expand_bracket(&mut h, 0.0, guess - 1.0, guess + 1.0, "drawdown matching")?;
        let u = brent(&mut h, lo, hi, 1e-14, "drawdown matching");
        if let Some(e) = err {
            return Err(e);
        }
        Ok(u?.exp())
    }

    /// Drawdown quantile `(-mu_tau - sigma tau^(1/alpha) Q_Z(1 - q))_+`.
    pub fn drawdown_quantile(&self, tau: f64, q: f64) -> Result<MetricValue> {
        check_tau(tau)?;
        check_level(q, 1.0)?;
        let mu = self.drift.mu.at(tau)?;
        let qz = self.driver.quantile(1.0 - q)?;
        let raw = -mu - self.scale(tau) * qz;
        let zn = norm_quantile(1.0 - q);
        let mut warnings = self.warnings(tau);
        let (graw, sigma_g) = if zn != 0.0 {
            let sg = self.anchor_scale() * qz / (self.tau0.sqrt() * zn);
            (-mu - sg * tau.sqrt() * zn, Some(sg))
        } else {
            warnings.push("surrogate cannot be quantile-matched at the median".into());
            (-mu, None)
        };
        if raw <= 0.0 {
            warnings.push("drawdown threshold clamped at zero".into());
        }
        let mut v = MetricValue::new(
            tau,
            q,
            raw.max(0.0),
            graw.max(0.0),
            Matching::DrawdownQuantile,
        );
        v.signed_levy = raw;
        v.matched_sigma_g = sigma_g;
        v.warnings = warnings;
        Ok(self.settle(v))
    }

    /// Leading-order Kelly fraction `(mu_tau - r_tau) / (K_q sigma^2 tau^(2/alpha))`.
    pub fn kelly_approx(&self, tau: f64, q: f64) -> Result<f64> {
        check_tau(tau)?;
        check_level(q, 0.5)?;
        let k = self.driver.truncated_second_moment(q)?;
        let s = self.scale(tau);
        Ok(self.drift.excess(tau)? / (k * s * s))
    }

    /// VaR-constrained Kelly fraction on `[0, 1/|VaR_tau(q)|]`.
    pub fn kelly(&self, tau: f64, q: f64, law: KellyLaw) -> Result<KellyResult> {
        check_tau(tau)?;
        check_level(q, 0.5)?;
        let var = self.var(tau, q)?.levy;
        let f_max = if var > 0.0 { 1.0 / var } else { f64::INFINITY };
        let cap = if var > 0.0 { f_max } else { self.f_cap };
        let e = self.drift.excess(tau)?;
        let s = self.scale(tau);
        match law {
            KellyLaw::Trimmed => self.kelly_trimmed(q, e, s, f_max, cap),
            KellyLaw::RuinTruncated => self.kelly_ruin(e, s, f_max, cap),
        }
    }

    fn kelly_trimmed(&self, q: f64, e: f64, s: f64, f_max: f64, cap: f64) -> Result<KellyResult> {
        let c = self.driver.quantile(q)?.abs();
        if !(c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                reason: "trimming band is empty",
            });
        }
        let (zs, ws) = self.trimmed_rule(c);
        let mass: f64 = ws.iter().sum();
        let center = zs.iter().zip(&ws).map(|(z, w)| z * w).sum::<f64>() / mass;
        let xs: Vec<f64> = zs.iter().map(|z| e + s * (z - center)).collect();
        let law = DiscreteLaw::new(xs, ws)?;
        let upper = ruin_bound(cap, e + s * (-c - center))?;
        let (f_star, binding) = maximize(|f| Ok(law.foc(f)), upper)?;
        let tight = QuadConfig::new(1e-14, 1e-12);
        let residual = integrate_points(
            |z| {
                let x = e + s * (z - center);
                x / (1.0 + f_star * x) * self.driver.density(z)
            },
            &band_points(c),
            &tight,
        )
        .value
            / mass;
        Ok(KellyResult {
            f_star,
            f_max,
            upper,
            foc_residual: residual,
            binding,
            growth: law.growth(f_star),
        })
    }

    /// Composite Kronrod rule for the density on `[-c, c]`.
    fn trimmed_rule(&self, c: f64) -> (Vec<f64>, Vec<f64>) {
        const PANELS: usize = 8;
        let pts = band_points(c);
        let mut zs = Vec::with_capacity(pts.len() * PANELS * 21);
        let mut ws = Vec::with_capacity(zs.capacity());
        for w in pts.windows(2) {
            let h = (w[1] - w[0]) / PANELS as f64;
            for k in 0..PANELS {
                let a = w[0] + k as f64 * h;
                for (z, wt) in kronrod_nodes(a, a + h) {
                    zs.push(z);
                    ws.push(wt * self.driver.density(z));
                }
            }
        }
        (zs, ws)
    }

    fn kelly_ruin(&self, e: f64, s: f64, f_max: f64, cap: f64) -> Result<KellyResult> {
        let a = self.params.alpha;
        let zr = (-1.0 - e) / s;
        let mass = self.driver.upper_tail(zr);
        let quad = QuadConfig::new(1e-14, 1e-11);
        let expect = |g: &dyn Fn(f64) -> f64| -> f64 {
            let mut pts: Vec<f64> = alloc::vec![zr];
            pts.extend([-CORE, 0.0, CORE].into_iter().filter(|p| *p > zr));
            let body = integrate_points(|z| g(z) * self.driver.density(z), &pts, &quad).value;
            let start = *pts.last().unwrap();
            let start = if start > 0.0 { start } else { CORE };
            let tail = integrate_power_tail(|z| g(z) * self.driver.density(z), start, a, &quad).value;
            (body + tail) / mass
        };
        let foc = |f: f64| {
            expect(&|z: f64| {
                let x = e + s * z;
                x / (1.0 + f * x)
            })
        };
        let upper = ruin_bound(cap, -1.0)?;
        let (f_star, binding) = maximize(|f| Ok(foc(f)), upper)?;
        let growth = expect(&|z: f64| (f_star * (e + s * z)).ln_1p());
        Ok(KellyResult {
            f_star,
            f_max,
            upper,
            foc_residual: foc(f_star),
            binding,
            growth,
        })
    }
}

fn band_points(c: f64) -> Vec<f64> {
    let mut pts = alloc::vec![-c];
    pts.extend([-CORE, 0.0, CORE].into_iter().filter(|p| p.abs() < c));
    pts.push(c);
    pts
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "tau",
            value: tau,
            reason: "must be positive and finite",
        })
    }
}

fn check_level(q: f64, max: f64) -> Result<()> {
    if q > 0.0 && (q < max || (max < 1.0 && q == max)) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "tail level out of range",
        })
    }
}

fn check_order(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "moment order must be positive",
        })
    }
}
