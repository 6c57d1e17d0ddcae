//! Exception-rate backtests of horizon-propagated VaR and drawdown
//! thresholds over overlapping returns.
//!
//! Thresholds are nonparametric: the empirical `tau0` quantile of the
//! training sample is carried to `tau` by `(tau / tau0)^(1/alpha)` (or
//! `^(1/2)` for the Gaussian surrogate) around a linear drift.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::kelly::KellyLaw;
use crate::metrics::{Drift, RiskModel};
use crate::stable::sample::rng_stream;
use crate::stats::{ols, quantile, spearman};

/// Scale law used to carry the anchor threshold across horizons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Levy,
    Gaussian,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Levy => "levy",
            Self::Gaussian => "gaussian",
        }
    }
}

/// Which part of the sample sets thresholds and which part is scored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Split {
    /// Fit and score on the full sample.
    InSample,
    /// Fit on the leading fraction, score on the rest.
    TrainTest { train_fraction: f64 },
}

impl Default for Split {
    fn default() -> Self {
        Self::TrainTest {
            train_fraction: 0.5,
        }
    }
}

pub const MIN_BACKTEST_OBS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktestResult {
    /// Horizon in steps.
    pub tau: usize,
    /// Level as configured (`q` for VaR, the drawdown quantile level otherwise).
    pub level: f64,
    /// Exception probability the threshold is designed for.
    pub nominal: f64,
    pub n_obs: usize,
    pub n_exceptions: usize,
    pub exception_rate: f64,
    /// `sqrt(nominal (1 - nominal) / n_obs)`; a lower bound under overlap.
    pub binomial_se: f64,
    pub z_score: f64,
    pub mode: Mode,
    /// Loss threshold the returns are compared against.
    pub threshold: f64,
    /// Drawdown threshold clamped to zero.
    pub degenerate_threshold: bool,
}

impl BacktestResult {
    fn new(tau: usize, level: f64, nominal: f64, hits: &[bool], mode: Mode, threshold: f64) -> Self {
        let n_obs = hits.len();
        let n_exceptions = hits.iter().filter(|h| **h).count();
        let exception_rate = n_exceptions as f64 / n_obs as f64;
        let binomial_se = (nominal * (1.0 - nominal) / n_obs as f64).sqrt();
        Self {
            tau,
            level,
            nominal,
            n_obs,
            n_exceptions,
            exception_rate,
            binomial_se,
            z_score: (exception_rate - nominal) / binomial_se,
            mode,
            threshold,
            degenerate_threshold: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestConfig {
    pub alpha: f64,
    /// Anchor horizon in steps.
    pub tau0: usize,
    pub horizons: Vec<usize>,
    pub split: Split,
    pub min_obs: usize,
}

impl BacktestConfig {
    pub fn new(alpha: f64, tau0: usize, horizons: Vec<usize>) -> Self {
        Self {
            alpha,
            tau0,
            horizons,
            split: Split::default(),
            min_obs: MIN_BACKTEST_OBS,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "must lie in (1, 2]",
            });
        }
        if self.tau0 == 0 || self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::DegenerateGrid("horizons and anchor must be positive".into()));
        }
        if let Split::TrainTest { train_fraction } = self.split {
            if !(train_fraction > 0.0 && train_fraction < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "train_fraction",
                    value: train_fraction,
                    reason: "must lie in (0, 1)",
                });
            }
        }
        Ok(())
    }

    fn exponent(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Levy => 1.0 / self.alpha,
            Mode::Gaussian => 0.5,
        }
    }
}

/// Anchor statistics estimated on the training sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    /// Drift per step.
    pub mu: f64,
    /// Empirical quantile of `tau0` returns.
    pub quantile: f64,
    pub tau0: usize,
}

impl Anchor {
    /// Return quantile at `tau` carried from the anchor with exponent `e`.
    pub fn carried(&self, tau: usize, e: f64) -> f64 {
        let ratio = tau as f64 / self.tau0 as f64;
        self.mu * tau as f64 + ratio.powf(e) * (self.quantile - self.mu * self.tau0 as f64)
    }
}

fn split_prices<'a>(log_prices: &'a [f64], split: Split) -> (&'a [f64], &'a [f64]) {
    match split {
        Split::InSample => (log_prices, log_prices),
        Split::TrainTest { train_fraction } => {
            let cut = ((log_prices.len() as f64) * train_fraction).floor() as usize;
            (&log_prices[..cut.max(1)], &log_prices[cut.saturating_sub(1)..])
        }
    }
}

fn overlapping(log_prices: &[f64], tau: usize) -> Vec<f64> {
    if log_prices.len() <= tau {
        return Vec::new();
    }
    log_prices[tau..]
        .iter()
        .zip(log_prices)
        .map(|(b, a)| b - a)
        .collect()
}

/// Drift and `tau0`-return quantile at level `level` from the training prices.
pub fn fit_anchor(train: &[f64], tau0: usize, level: f64, min_obs: usize) -> Result<Anchor> {
    let r = overlapping(train, tau0);
    if r.len() < min_obs {
        return Err(Error::SampleTooSmall {
            horizon: tau0,
            size: r.len(),
            min: min_obs,
        });
    }
    let mu = (train[train.len() - 1] - train[0]) / (train.len() - 1) as f64;
    Ok(Anchor {
        mu,
        quantile: quantile(&r, level)?,
        tau0,
    })
}

fn scored_returns(test: &[f64], tau: usize, min_obs: usize) -> Result<Vec<f64>> {
    let r = overlapping(test, tau);
    if r.len() < min_obs {
        return Err(Error::SampleTooSmall {
            horizon: tau,
            size: r.len(),
            min: min_obs,
        });
    }
    Ok(r)
}

/// VaR exception counts at level `q`: events `R_tau <= -VaR_tau(q)`.
/// Returns levy-mode results followed by gaussian-mode results.
pub fn backtest_var(log_prices: &[f64], q: f64, cfg: &BacktestConfig) -> Result<Vec<BacktestResult>> {
    cfg.validate()?;
    check_level(q)?;
    let (train, test) = split_prices(log_prices, cfg.split);
    let anchor = fit_anchor(train, cfg.tau0, q, cfg.min_obs)?;
    let mut out = Vec::with_capacity(2 * cfg.horizons.len());
    for mode in [Mode::Levy, Mode::Gaussian] {
        for &tau in &cfg.horizons {
            let r = scored_returns(test, tau, cfg.min_obs)?;
            let cut = anchor.carried(tau, cfg.exponent(mode));
            let hits: Vec<bool> = r.iter().map(|x| *x <= cut).collect();
            out.push(BacktestResult::new(tau, q, q, &hits, mode, -cut));
        }
    }
    Ok(out)
}

/// Drawdown breaches at quantile level `q`: events `(-R_tau)_+ > DD_tau^(q)`,
/// designed to occur with probability `1 - q`. Levy mode only.
pub fn backtest_drawdown(log_prices: &[f64], q: f64, cfg: &BacktestConfig) -> Result<Vec<BacktestResult>> {
    cfg.validate()?;
    check_level(q)?;
    let (train, test) = split_prices(log_prices, cfg.split);
    let anchor = fit_anchor(train, cfg.tau0, 1.0 - q, cfg.min_obs)?;
    let mut out = Vec::with_capacity(cfg.horizons.len());
    for &tau in &cfg.horizons {
        let r = scored_returns(test, tau, cfg.min_obs)?;
        let raw = -anchor.carried(tau, cfg.exponent(Mode::Levy));
        let threshold = raw.max(0.0);
        let hits: Vec<bool> = r.iter().map(|x| (-x).max(0.0) > threshold).collect();
        let mut res = BacktestResult::new(tau, q, 1.0 - q, &hits, Mode::Levy, threshold);
        res.degenerate_threshold = raw <= 0.0;
        out.push(res);
    }
    Ok(out)
}

/// Moving-block bootstrap SE of the exception rate at one horizon; accounts
/// for the clustering that overlapping windows induce.
pub fn exception_block_se(
    log_prices: &[f64],
    q: f64,
    tau: usize,
    cfg: &BacktestConfig,
    mode: Mode,
    block_len: usize,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    cfg.validate()?;
    check_level(q)?;
    let (train, test) = split_prices(log_prices, cfg.split);
    let anchor = fit_anchor(train, cfg.tau0, q, cfg.min_obs)?;
    let r = scored_returns(test, tau, cfg.min_obs)?;
    let cut = anchor.carried(tau, cfg.exponent(mode));
    let hits: Vec<f64> = r.iter().map(|x| if *x <= cut { 1.0 } else { 0.0 }).collect();
    let n = hits.len();
    let b = block_len.clamp(1, n);
    if replicates < 2 {
        return Err(Error::InvalidParameter {
            name: "replicates",
            value: replicates as f64,
            reason: "need at least two",
        });
    }
    // Prefix sums make each block an O(1) lookup.
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for h in &hits {
        prefix.push(prefix[prefix.len() - 1] + h);
    }
    let starts = n - b + 1;
    let blocks = n.div_ceil(b);
    let mut rng = rng_stream(seed, 3);
    let mut rates = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let mut total = 0.0;
        let mut count = 0;
        for _ in 0..blocks {
            let s = (rng.next_u64() % starts as u64) as usize;
            let len = b.min(n - count);
            total += prefix[s + len] - prefix[s];
            count += len;
        }
        rates.push(total / count as f64);
    }
    let m = rates.iter().sum::<f64>() / replicates as f64;
    let v = rates.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (replicates - 1) as f64;
    Ok(v.sqrt())
}

/// Rank correlation of z-scores with log horizon and its two-sided 5%
/// critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendCheck {
    pub rho: f64,
    pub critical: f64,
}

impl TrendCheck {
    pub fn flat(&self) -> bool {
        self.rho.is_nan() || self.rho.abs() < self.critical
    }
}

pub fn z_trend(results: &[BacktestResult]) -> Option<TrendCheck> {
    let n = results.len();
    if n < 5 {
        return None;
    }
    let x: Vec<f64> = results.iter().map(|r| (r.tau as f64).ln()).collect();
    let z: Vec<f64> = results.iter().map(|r| r.z_score).collect();
    Some(TrendCheck {
        rho: spearman(&x, &z),
        critical: spearman_critical(n),
    })
}

/// Two-sided 5% critical values of Spearman's rho.
fn spearman_critical(n: usize) -> f64 {
    const TABLE: [f64; 16] = [
        1.0, 0.886, 0.786, 0.738, 0.700, 0.648, 0.618, 0.587, 0.560, 0.538, 0.521, 0.503, 0.485,
        0.472, 0.460, 0.447,
    ];
    match n {
        5..=20 => TABLE[n - 5],
        _ => 1.96 / ((n - 1) as f64).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KellyScaling {
    pub horizons: Vec<f64>,
    pub f_star: Vec<f64>,
    pub slope: f64,
    /// `1 - 2 / alpha`.
    pub expected: f64,
}

/// OLS slope of `log f*` on `log tau` for a linear-drift model.
pub fn kelly_scaling_check(model: &RiskModel, q: f64, horizons: &[f64], law: KellyLaw) -> Result<KellyScaling> {
    if horizons.len() < 3 {
        return Err(Error::DegenerateGrid("need at least three horizons".into()));
    }
    let drift = model.drift();
    if !matches!((&drift.mu, &drift.r), (Drift::Linear(_), Drift::Linear(_))) {
        return Err(Error::InvalidParameter {
            name: "drift",
            value: f64::NAN,
            reason: "scaling check needs a linear drift",
        });
    }
    let mut f_star = Vec::with_capacity(horizons.len());
    for &tau in horizons {
        let r = model.kelly(tau, q, law)?;
        if !(r.f_star > 0.0) {
            return Err(Error::InvalidParameter {
                name: "excess drift",
                value: drift.excess(tau)?,
                reason: "Kelly fraction is zero; no edge to scale",
            });
        }
        f_star.push(r.f_star);
    }
    let lx: Vec<f64> = horizons.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = f_star.iter().map(|f| f.ln()).collect();
    let fit = ols(&lx, &ly)?;
    Ok(KellyScaling {
        horizons: horizons.to_vec(),
        f_star,
        slope: fit.slope,
        expected: 1.0 - 2.0 / model.params().alpha,
    })
}

/// Log-log slope of `E|R_tau - E R_tau|^p` on `tau` from overlapping returns;
/// `p / alpha` on a stable window.
pub fn moment_scaling(log_prices: &[f64], horizons: &[usize], p: f64) -> Result<f64> {
    if horizons.len() < 2 {
        return Err(Error::DegenerateGrid("need at least two horizons".into()));
    }
    let mut lx = Vec::with_capacity(horizons.len());
    let mut ly = Vec::with_capacity(horizons.len());
    for &tau in horizons {
        let r = overlapping(log_prices, tau);
        if r.len() < 2 {
            return Err(Error::HorizonExceedsSpan {
                horizon: tau,
                span: log_prices.len().saturating_sub(1),
            });
        }
        let m = r.iter().sum::<f64>() / r.len() as f64;
        let c = r.iter().map(|x| (x - m).abs().powf(p)).sum::<f64>() / r.len() as f64;
        lx.push((tau as f64).ln());
        ly.push(c.ln());
    }
    Ok(ols(&lx, &ly)?.slope)
}

fn check_level(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "must lie in (0, 1)",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(n: usize) -> Vec<f64> {
        // Deterministic, tie-free increments with a mild drift.
        let mut p = alloc::vec![0.0];
        for i in 1..n {
            let u = (i as f64 * 0.754_877_666).fract();
            p.push(p[i - 1] + (u - 0.5) * (1.0 + u * u) + 0.01);
        }
        p
    }

    #[test]
    fn counts_are_exact() {
        let prices = [0.0, -1.0, 0.0, -2.0, -2.0];
        let hits: Vec<bool> = overlapping(&prices, 1).iter().map(|x| *x <= -1.0).collect();
        assert_eq!(hits, [true, false, true, false]);
        let r = BacktestResult::new(1, 0.25, 0.25, &hits, Mode::Levy, 1.0);
        assert_eq!((r.n_obs, r.n_exceptions), (4, 2));
        assert!((r.binomial_se - (0.25f64 * 0.75 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn anchor_horizon_in_sample_is_calibrated() {
        let p = walk(5000);
        let mut cfg = BacktestConfig::new(1.5, 1, alloc::vec![1, 2, 4]);
        cfg.split = Split::InSample;
        let res = backtest_var(&p, 0.05, &cfg).unwrap();
        assert_eq!(res.len(), 6);
        let r = &res[0];
        assert!((r.exception_rate - 0.05).abs() < 2.0 / r.n_obs as f64, "{r:?}");
        // At the anchor both modes share the threshold.
        assert_eq!(res[0].threshold, res[3].threshold);
    }

    #[test]
    fn zero_drift_drawdown_matches_var() {
        let mut p = walk(4000);
        let slope = (p[p.len() - 1] - p[0]) / (p.len() - 1) as f64;
        for (i, x) in p.iter_mut().enumerate() {
            *x -= slope * i as f64;
        }
        let cfg = BacktestConfig::new(1.5, 2, alloc::vec![2, 4, 8]);
        let dd = backtest_drawdown(&p, 0.95, &cfg).unwrap();
        let var = backtest_var(&p, 0.05, &cfg).unwrap();
        for (d, v) in dd.iter().zip(&var) {
            assert!((d.threshold - v.threshold).abs() < 1e-12);
            assert_eq!(d.n_exceptions, v.n_exceptions);
        }
    }

    #[test]
    fn clamped_drawdown_threshold_is_flagged() {
        let p: Vec<f64> = (0..2000).map(|i| i as f64 + if i % 2 == 0 { 0.0 } else { 0.3 }).collect();
        let cfg = BacktestConfig::new(1.5, 1, alloc::vec![1, 2]);
        let dd = backtest_drawdown(&p, 0.95, &cfg).unwrap();
        assert!(dd.iter().all(|r| r.degenerate_threshold && r.threshold == 0.0));
        assert!(dd.iter().all(|r| r.n_exceptions == 0));
    }

    #[test]
    fn small_samples_are_rejected() {
        let p = walk(150);
        let cfg = BacktestConfig::new(1.5, 1, alloc::vec![1, 64]);
        assert!(matches!(backtest_var(&p, 0.05, &cfg), Err(Error::SampleTooSmall { .. })));
    }

    #[test]
    fn critical_values() {
        assert_eq!(spearman_critical(5), 1.0);
        assert!((spearman_critical(30) - 1.96 / 29f64.sqrt()).abs() < 1e-15);
    }
}
