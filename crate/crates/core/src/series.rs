//! Equally spaced log-price series, overlapping multi-horizon returns and
//! robust scale curves.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::special::norm_quantile;
use crate::stable::sample::{rng_stream, standard_normal};
use crate::stable::{StableDriver, StableParams, StableSampler};
use crate::stats::{iqr, mad};

const SPACING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    timestamps: Vec<f64>,
    log_prices: Vec<f64>,
    step: f64,
}

impl PriceSeries {
    /// Validates lengths, finiteness and equal spacing of the timestamps.
    pub fn new(timestamps: Vec<f64>, log_prices: Vec<f64>) -> Result<Self> {
        let n = log_prices.len();
        if n < 2 {
            return Err(Error::SeriesTooShort { len: n, min: 2 });
        }
        if timestamps.len() != n {
            return Err(Error::InvalidParameter {
                name: "timestamps",
                value: timestamps.len() as f64,
                reason: "timestamp and price columns differ in length",
            });
        }
        if let Some(&x) = log_prices.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "log_price",
                value: x,
                reason: "log prices must be finite",
            });
        }
        let step = timestamps[1] - timestamps[0];
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::UnevenSpacing { index: 1 });
        }
        for i in 1..n {
            let d = timestamps[i] - timestamps[i - 1];
            let drift = (timestamps[i] - timestamps[0]) - step * i as f64;
            if !(d > 0.0) || (d - step).abs() > SPACING_TOL * step || drift.abs() > SPACING_TOL * step * i as f64 {
                return Err(Error::UnevenSpacing { index: i });
            }
        }
        Ok(Self {
            timestamps,
            log_prices,
            step,
        })
    }

    /// Series on the integer clock `0, 1, 2, ...`.
    pub fn from_log_prices(log_prices: Vec<f64>) -> Result<Self> {
        let ts = (0..log_prices.len()).map(|i| i as f64).collect();
        Self::new(ts, log_prices)
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn log_prices(&self) -> &[f64] {
        &self.log_prices
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.log_prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_prices.is_empty()
    }

    /// One-step log returns.
    pub fn increments(&self) -> Vec<f64> {
        self.log_prices.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Converts a horizon in time units to a whole number of steps.
    pub fn horizon_steps(&self, tau: f64) -> Result<usize> {
        let k = tau / self.step;
        let r = k.round();
        if !(r >= 1.0) || (k - r).abs() > SPACING_TOL * r.max(1.0) {
            return Err(Error::NonIntegerHorizon { horizon: tau });
        }
        Ok(r as usize)
    }
}

/// Overlapping returns `X[t + tau] - X[t]` on a set of horizons (in steps).
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonGrid {
    horizons: Vec<usize>,
    log_horizons: Vec<f64>,
    returns: Vec<Vec<f64>>,
}

impl HorizonGrid {
    pub fn horizons(&self) -> &[usize] {
        &self.horizons
    }

    pub fn log_horizons(&self) -> &[f64] {
        &self.log_horizons
    }

    pub fn returns(&self) -> &[Vec<f64>] {
        &self.returns
    }

    pub fn len(&self) -> usize {
        self.horizons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.horizons.is_empty()
    }

    /// True when the log horizons have no spread (a single distinct horizon).
    pub fn is_degenerate(&self) -> bool {
        self.horizons.len() < 2
    }
}

/// Returns on horizons given in time units; each must be a whole number of steps.
pub fn build_returns(series: &PriceSeries, horizons: &[f64]) -> Result<HorizonGrid> {
    let steps = horizons
        .iter()
        .map(|&t| series.horizon_steps(t))
        .collect::<Result<Vec<_>>>()?;
    build_returns_steps(series.log_prices(), &steps)
}

/// Returns on horizons given in steps.
pub fn build_returns_steps(log_prices: &[f64], horizons: &[usize]) -> Result<HorizonGrid> {
    let n = log_prices.len();
    if horizons.is_empty() {
        return Err(Error::DegenerateGrid("no horizons".into()));
    }
    for (j, &h) in horizons.iter().enumerate() {
        if h == 0 {
            return Err(Error::NonIntegerHorizon { horizon: 0.0 });
        }
        if h >= n {
            return Err(Error::HorizonExceedsSpan {
                horizon: h,
                span: n.saturating_sub(1),
            });
        }
        if j > 0 && h <= horizons[j - 1] {
            return Err(Error::DegenerateGrid("horizons must be strictly increasing".into()));
        }
    }
    let returns = horizons
        .iter()
        .map(|&h| (0..n - h).map(|k| log_prices[k + h] - log_prices[k]).collect())
        .collect();
    Ok(HorizonGrid {
        horizons: horizons.to_vec(),
        log_horizons: horizons.iter().map(|&h| (h as f64).ln()).collect(),
        returns,
    })
}

/// Integer horizons `per_decade` to a decade, log-equispaced from `lo` to
/// `hi` inclusive, rounded and deduplicated.
pub fn log_spaced_horizons(lo: usize, hi: usize, per_decade: usize) -> Result<Vec<usize>> {
    if lo == 0 || hi <= lo || per_decade == 0 {
        return Err(Error::DegenerateGrid(alloc::format!(
            "need 0 < lo < hi and a positive density, got lo={lo} hi={hi} per_decade={per_decade}"
        )));
    }
    let (a, b) = ((lo as f64).log10(), (hi as f64).log10());
    let count = ((b - a) * per_decade as f64 + 1e-9).floor() as usize;
    let mut out: Vec<usize> = Vec::with_capacity(count + 2);
    for k in 0..=count {
        let t = (10f64.powf(a + k as f64 / per_decade as f64)).round() as usize;
        if out.last().map_or(true, |&l| t > l) && t <= hi {
            out.push(t);
        }
    }
    if out.last() != Some(&hi) {
        out.push(hi);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleFunctional {
    #[default]
    Mad,
    Iqr,
}

impl ScaleFunctional {
    pub fn apply(self, xs: &[f64]) -> Result<f64> {
        match self {
            Self::Mad => mad(xs),
            Self::Iqr => iqr(xs),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mad => "mad",
            Self::Iqr => "iqr",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleCurve {
    pub horizons: Vec<usize>,
    pub s_values: Vec<f64>,
    pub g_values: Vec<f64>,
    pub functional: ScaleFunctional,
}

impl ScaleCurve {
    pub fn log_horizons(&self) -> Vec<f64> {
        self.horizons.iter().map(|&h| (h as f64).ln()).collect()
    }
}

/// `S_tau` and `g = log S_tau` per horizon; `min_size` is the sample floor.
pub fn scale_curve(grid: &HorizonGrid, functional: ScaleFunctional, min_size: usize) -> Result<ScaleCurve> {
    let mut s_values = Vec::with_capacity(grid.len());
    for (&h, r) in grid.horizons().iter().zip(grid.returns()) {
        if r.len() < min_size {
            return Err(Error::SampleTooSmall {
                horizon: h,
                size: r.len(),
                min: min_size,
            });
        }
        let s = functional.apply(r)?;
        if !(s > 0.0) {
            return Err(Error::DegenerateScale { horizon: h });
        }
        s_values.push(s);
    }
    Ok(ScaleCurve {
        horizons: grid.horizons().to_vec(),
        g_values: s_values.iter().map(|s| s.ln()).collect(),
        s_values,
        functional,
    })
}

fn check_length(n: usize) -> Result<()> {
    if n < 1000 {
        return Err(Error::SeriesTooShort { len: n, min: 1000 });
    }
    Ok(())
}

fn path(increments: impl Iterator<Item = f64>, n: usize) -> Result<PriceSeries> {
    let mut x = Vec::with_capacity(n + 1);
    x.push(0.0);
    let mut level = 0.0;
    for d in increments {
        level += d;
        x.push(level);
    }
    PriceSeries::from_log_prices(x)
}

/// `n` steps of `X` with iid increments `mu + sigma Z`, so that returns
/// scale exactly as `tau^(1/alpha)` on every horizon.
pub fn simulate_window(params: &StableParams, n: usize, seed: u64) -> Result<PriceSeries> {
    check_length(n)?;
    let sampler = StableSampler::new(params);
    let mut rng = rng_stream(seed, 0);
    let (mu, sigma) = (params.mu, params.sigma);
    path((0..n).map(|_| mu + sigma * sampler.draw(&mut rng)), n)
}

/// Path with three scaling regimes: microstructure noise below `tau_uv`,
/// stable scaling `sigma tau^(1/alpha)` between the cutoffs and Gaussian
/// `sqrt(tau)` aggregation above `tau_ir` (both in steps).
///
/// The stable part is `a (xi_t - xi_{t-T})` per step with `T = tau_ir`, a
/// moving sum whose `tau`-returns are exactly symmetric stable with scale
/// `sigma tau^(1/alpha)` for `tau <= T` and frozen beyond. A flat moving
/// average of Gaussian noise over `T` steps grows like `tau` below `T` and
/// `sqrt(tau)` above, matched to the stable median deviation at `T`. One-step
/// noise `e_t - e_{t-1}` is matched to it at `tau_uv`. The skewness of
/// `params` is not reproduced: differencing symmetrizes the driver.
pub fn simulate_two_regime(
    params: &StableParams,
    tau_uv: usize,
    tau_ir: usize,
    n: usize,
    seed: u64,
) -> Result<PriceSeries> {
    check_length(n)?;
    if tau_uv == 0 || tau_ir <= tau_uv {
        return Err(Error::InvalidParameter {
            name: "tau_ir",
            value: tau_ir as f64,
            reason: "cutoffs must satisfy 0 < tau_uv < tau_ir",
        });
    }
    let alpha = params.alpha;
    let sigma = params.sigma;
    let t = tau_ir;
    let symmetric = StableParams::standard(alpha, 0.0)?;
    let mad_z = StableDriver::new(&symmetric).mad()?;
    let mad_n = norm_quantile(0.75);

    let sampler = StableSampler::new(&symmetric);
    let mut stable_rng = rng_stream(seed, 0);
    let mut gauss_rng = rng_stream(seed, 1);
    let mut noise_rng = rng_stream(seed, 2);

    let xi: Vec<f64> = (0..n + t).map(|_| sampler.draw(&mut stable_rng)).collect();
    let eta: Vec<f64> = (0..n + t).map(|_| standard_normal(&mut gauss_rng)).collect();

    // tau-return of the moving average at tau = T has weights 1, 2, .., T, .., 1.
    let tf = t as f64;
    let weight_ss = tf * (tf + 1.0) * (2.0 * tf + 1.0) / 3.0 - tf * tf;
    let a = sigma / 2f64.powf(1.0 / alpha);
    let c = sigma * tf.powf(1.0 / alpha) * mad_z / (mad_n * weight_ss.sqrt());
    let noise = sigma * (tau_uv as f64).powf(1.0 / alpha) * mad_z / (mad_n * 2f64.sqrt());

    let mut window: f64 = eta[..t].iter().sum();
    let mut prev_noise = noise * standard_normal(&mut noise_rng);
    let mu = params.mu;
    let incs = (0..n).map(move |i| {
        window += eta[i + t] - eta[i];
        let e = noise * standard_normal(&mut noise_rng);
        let d = mu + a * (xi[i + t] - xi[i]) + c * window + e - prev_noise;
        prev_noise = e;
        d
    });
    path(incs, n)
}

/// Resamples whole blocks of `increments` (with replacement, wrapping at the
/// end) into a path of the same length starting at zero.
pub fn block_resample<R: RngCore + ?Sized>(increments: &[f64], block_len: usize, rng: &mut R) -> Vec<f64> {
    let n = increments.len();
    let b = block_len.clamp(1, n.max(1));
    let mut x = Vec::with_capacity(n + 1);
    x.push(0.0);
    let mut level = 0.0;
    while x.len() <= n {
        let start = (rng.next_u64() % n as u64) as usize;
        for k in 0..b {
            if x.len() > n {
                break;
            }
            level += increments[(start + k) % n];
            x.push(level);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::sample::rng_from_seed;
    use crate::stats::ols;

    #[test]
    fn direct_differencing() {
        let g = build_returns_steps(&[0.0, 0.1, 0.3], &[1, 2]).unwrap();
        assert_eq!(g.returns()[0], alloc::vec![0.1, 0.3 - 0.1]);
        assert_eq!(g.returns()[1], alloc::vec![0.3]);
        let flat = build_returns_steps(&[2.0; 10], &[1, 3]).unwrap();
        assert!(flat.returns().iter().flatten().all(|&r| r == 0.0));
    }

    #[test]
    fn horizon_validation() {
        let s = PriceSeries::new(alloc::vec![0.0, 0.5, 1.0, 1.5], alloc::vec![0.0; 4]).unwrap();
        assert_eq!(s.horizon_steps(1.0).unwrap(), 2);
        assert!(matches!(build_returns(&s, &[0.75]), Err(Error::NonIntegerHorizon { .. })));
        assert!(matches!(build_returns(&s, &[2.0]), Err(Error::HorizonExceedsSpan { .. })));
        assert!(build_returns_steps(&[0.0; 5], &[2, 1]).is_err());
    }

    #[test]
    fn rejects_gaps_and_short_input() {
        assert!(matches!(
            PriceSeries::new(alloc::vec![0.0, 1.0, 3.0], alloc::vec![0.0; 3]),
            Err(Error::UnevenSpacing { index: 2 })
        ));
        assert!(matches!(
            PriceSeries::from_log_prices(alloc::vec![1.0]),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(PriceSeries::from_log_prices(alloc::vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn grid_spacing() {
        let h = log_spaced_horizons(1, 100, 4).unwrap();
        assert_eq!(h, alloc::vec![1, 2, 3, 6, 10, 18, 32, 56, 100]);
        let h = log_spaced_horizons(4, 50, 8).unwrap();
        assert_eq!(*h.last().unwrap(), 50);
        assert!(h.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn scale_floor_and_degeneracy() {
        let g = build_returns_steps(&[0.0, 1.0, 2.0, 3.0, 4.0], &[1]).unwrap();
        assert!(matches!(
            scale_curve(&g, ScaleFunctional::Mad, 16),
            Err(Error::SampleTooSmall { .. })
        ));
        assert!(matches!(
            scale_curve(&g, ScaleFunctional::Mad, 2),
            Err(Error::DegenerateScale { horizon: 1 })
        ));
    }

    #[test]
    fn resampled_path_keeps_length() {
        let inc: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let mut rng = rng_from_seed(3);
        let x = block_resample(&inc, 7, &mut rng);
        assert_eq!(x.len(), 101);
        assert_eq!(x[0], 0.0);
    }

    #[test]
    fn window_path_scaling_slope() {
        let p = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap();
        let s = simulate_window(&p, 200_000, 11).unwrap();
        let hs = [1, 2, 4, 8, 16, 32, 64, 128];
        let curve = scale_curve(&build_returns_steps(s.log_prices(), &hs).unwrap(), ScaleFunctional::Mad, 16).unwrap();
        let fit = ols(&curve.log_horizons(), &curve.g_values).unwrap();
        assert!((fit.slope - 1.0 / 1.5).abs() < 0.02, "slope {}", fit.slope);
    }

    #[test]
    fn simulation_is_deterministic() {
        let p = StableParams::new(1.5, 0.2, 0.01, 1e-4).unwrap();
        assert_eq!(simulate_window(&p, 2000, 5).unwrap(), simulate_window(&p, 2000, 5).unwrap());
        assert_eq!(
            simulate_two_regime(&p, 4, 64, 2000, 5).unwrap(),
            simulate_two_regime(&p, 4, 64, 2000, 5).unwrap()
        );
        assert_ne!(simulate_window(&p, 2000, 5).unwrap(), simulate_window(&p, 2000, 6).unwrap());
        assert!(simulate_window(&p, 999, 5).is_err());
        assert!(simulate_two_regime(&p, 64, 4, 2000, 5).is_err());
    }
}
