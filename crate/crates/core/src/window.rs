//! Tail index from the decay of the central mass, and window cutoffs from a
//! piecewise-affine fit of the log scale curve.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::series::{
    block_resample, build_returns_steps, log_spaced_horizons, scale_curve, HorizonGrid, PriceSeries,
    ScaleCurve, ScaleFunctional,
};
use crate::stable::sample::rng_stream;
use crate::stable::{StableDriver, StableParams};
use crate::stats::{least_squares, mad, ols, select_quantile};

/// Plug-in central masses `P0(tau) = P(|R_tau - m_tau| <= delta)` with the
/// per-horizon sample median as center.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralMassCurve {
    /// Retained horizons, in steps.
    pub horizons: Vec<usize>,
    pub delta: f64,
    pub p0_hat: Vec<f64>,
    pub centers: Vec<f64>,
    pub y_values: Vec<f64>,
    pub sizes: Vec<usize>,
    /// Horizons dropped because no return fell inside the band.
    pub dropped: Vec<usize>,
}

impl CentralMassCurve {
    pub fn log_horizons(&self) -> Vec<f64> {
        self.horizons.iter().map(|&h| (h as f64).ln()).collect()
    }
}

pub fn central_mass(grid: &HorizonGrid, delta: f64, min_size: usize) -> Result<CentralMassCurve> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "band half-width must be positive and finite",
        });
    }
    let mut out = CentralMassCurve {
        horizons: Vec::new(),
        delta,
        p0_hat: Vec::new(),
        centers: Vec::new(),
        y_values: Vec::new(),
        sizes: Vec::new(),
        dropped: Vec::new(),
    };
    let mut buf = Vec::new();
    for (&h, r) in grid.horizons().iter().zip(grid.returns()) {
        if r.len() < min_size.max(1) {
            return Err(Error::SampleTooSmall {
                horizon: h,
                size: r.len(),
                min: min_size,
            });
        }
        buf.clear();
        buf.extend_from_slice(r);
        let m = select_quantile(&mut buf, 0.5);
        let hits = r.iter().filter(|&&x| (x - m).abs() <= delta).count();
        if hits == 0 {
            out.dropped.push(h);
            continue;
        }
        let p = hits as f64 / r.len() as f64;
        out.horizons.push(h);
        out.p0_hat.push(p);
        out.centers.push(m);
        out.y_values.push(p.ln());
        out.sizes.push(r.len());
    }
    if out.horizons.is_empty() {
        return Err(Error::EstimationImpossible);
    }
    Ok(out)
}

/// Population central mass about the mean, `F(u) - F(-u)` at
/// `u = delta / (sigma tau^(1/alpha))`.
pub fn population_central_mass(params: &StableParams, delta: f64, tau: f64) -> Result<f64> {
    let d = StableDriver::new(params);
    let u = delta / (params.sigma * tau.powf(1.0 / params.alpha));
    Ok(d.cdf(u)? - d.cdf(-u)?)
}

/// Standard errors between the slope and the Gaussian boundary required by
/// [`SlopeFit::levy_window`].
pub const WINDOW_MARGIN_SE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeMethod {
    /// White (HC0) standard error of the regression on the retained horizons.
    /// Treats the horizons as independent, so it is optimistic: the central
    /// masses share the same data.
    Sandwich,
    /// Standard deviation over block-bootstrap replicates of the full pipeline.
    Bootstrap {
        replicates: usize,
        block_len: usize,
        failed: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub alpha_hat: f64,
    pub se_slope: f64,
    pub se_alpha: f64,
    /// `slope` in `(-1, -1/2)`.
    pub in_range: bool,
    pub sse: f64,
    pub n_horizons: usize,
    pub se_method: SeMethod,
}

impl SlopeFit {
    fn with_se(mut self, se: f64, method: SeMethod) -> Self {
        self.se_slope = se;
        self.se_alpha = se / (self.slope * self.slope);
        self.se_method = method;
        self
    }

    /// In range, and the Gaussian boundary `-1/2` lies more than
    /// [`WINDOW_MARGIN_SE`] standard errors above the slope.
    pub fn levy_window(&self) -> bool {
        self.in_range && self.slope + WINDOW_MARGIN_SE * self.se_slope < -0.5
    }
}

pub fn fit_slope(curve: &CentralMassCurve) -> Result<SlopeFit> {
    if curve.horizons.len() < 3 {
        return Err(Error::DegenerateGrid(alloc::format!(
            "{} retained horizons, need at least 3",
            curve.horizons.len()
        )));
    }
    let fit = ols(&curve.log_horizons(), &curve.y_values)?;
    if fit.slope >= 0.0 {
        return Err(Error::NotLevyWindow { slope: fit.slope });
    }
    let slope = fit.slope;
    Ok(SlopeFit {
        slope,
        intercept: fit.intercept,
        alpha_hat: -1.0 / slope,
        se_slope: fit.se_slope_hc0,
        se_alpha: fit.se_slope_hc0 / (slope * slope),
        in_range: slope > -1.0 && slope < -0.5,
        sse: fit.sse,
        n_horizons: fit.n,
        se_method: SeMethod::Sandwich,
    })
}

/// One block-bootstrap replicate of the slope pipeline per index: resample
/// blocks of one-step increments, rebuild the path and the returns, recount
/// the central masses with the original `delta` and refit.
#[derive(Debug, Clone)]
pub struct SlopeBootstrap {
    increments: Vec<f64>,
    horizons: Vec<usize>,
    delta: f64,
    min_size: usize,
    block_len: usize,
    replicates: usize,
    seed: u64,
}

impl SlopeBootstrap {
    pub fn new(
        series: &PriceSeries,
        horizons: &[usize],
        delta: f64,
        min_size: usize,
        block_len: usize,
        replicates: usize,
        seed: u64,
    ) -> Self {
        Self {
            increments: series.increments(),
            horizons: horizons.to_vec(),
            delta,
            min_size,
            block_len: block_len.max(1),
            replicates,
            seed,
        }
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Slope of replicate `index`; `None` when the replicate is degenerate.
    pub fn replicate(&self, index: usize) -> Option<f64> {
        let mut rng = rng_stream(self.seed, 1 << 32 | index as u64);
        let path = block_resample(&self.increments, self.block_len, &mut rng);
        let grid = build_returns_steps(&path, &self.horizons).ok()?;
        let curve = central_mass(&grid, self.delta, self.min_size).ok()?;
        fit_slope(&curve).ok().map(|f| f.slope)
    }

    pub fn run_sequential(&self) -> Vec<Option<f64>> {
        (0..self.replicates).map(|i| self.replicate(i)).collect()
    }
}

/// Sample standard deviation of the successful replicates, and the number
/// that failed.
pub fn bootstrap_se(slopes: &[Option<f64>]) -> (f64, usize) {
    let ok: Vec<f64> = slopes.iter().flatten().copied().collect();
    let failed = slopes.len() - ok.len();
    if ok.len() < 2 {
        return (f64::NAN, failed);
    }
    let m = ok.iter().sum::<f64>() / ok.len() as f64;
    let v = ok.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / (ok.len() - 1) as f64;
    (v.sqrt(), failed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SegmentModel {
    /// Sub-UV, window and super-IR segments (two kinks).
    #[default]
    ThreePiece,
    /// Window and super-IR segments (one kink at the IR cutoff).
    TwoPiece,
}

impl SegmentModel {
    pub fn name(self) -> &'static str {
        match self {
            Self::ThreePiece => "three-piece",
            Self::TwoPiece => "two-piece",
        }
    }
}

/// Above this F-ratio of the kinked fit against a single line the data are
/// taken to show at least one cutoff inside the span.
pub const FULL_RANGE_F: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowEstimate {
    pub model: SegmentModel,
    pub span: (usize, usize),
    pub tau_uv_hat: usize,
    pub tau_ir_hat: usize,
    /// Fitted slopes, left to right.
    pub segment_slopes: Vec<f64>,
    pub intercept: f64,
    pub sse: f64,
    /// Residual sum of squares of a single line over the span.
    pub line_sse: f64,
    /// `1 / window slope`.
    pub alpha_hat_scale: f64,
    /// Homoskedastic standard error of a line fitted to the window points alone.
    pub window_slope_se: f64,
    pub spans_full_range: bool,
}

impl WindowEstimate {
    pub fn window_slope(&self) -> f64 {
        match self.model {
            SegmentModel::ThreePiece => self.segment_slopes[1],
            SegmentModel::TwoPiece => self.segment_slopes[0],
        }
    }
}

fn hinge(x: f64, at: f64) -> f64 {
    (x - at).max(0.0)
}

/// Continuous piecewise-affine least squares of `g` on `log tau` with kinks
/// restricted to grid horizons, by exhaustive search. Each segment keeps at
/// least two points; near-ties (within `1e-12` of the total sum of squares)
/// go to the widest window.
pub fn two_segment_fit(curve: &ScaleCurve, span: (usize, usize), model: SegmentModel) -> Result<WindowEstimate> {
    let (lo, hi) = span;
    if lo >= hi {
        return Err(Error::InvalidParameter {
            name: "span",
            value: lo as f64,
            reason: "span must satisfy tau_lo < tau_hi",
        });
    }
    let idx: Vec<usize> = (0..curve.horizons.len())
        .filter(|&i| curve.horizons[i] >= lo && curve.horizons[i] <= hi)
        .collect();
    let n = idx.len();
    if n < 8 {
        return Err(Error::FitInfeasible(alloc::format!(
            "span [{lo}, {hi}] holds {n} grid horizons, need at least 8"
        )));
    }
    let h: Vec<usize> = idx.iter().map(|&i| curve.horizons[i]).collect();
    let x: Vec<f64> = h.iter().map(|&t| (t as f64).ln()).collect();
    let y: Vec<f64> = idx.iter().map(|&i| curve.g_values[i]).collect();
    let ym = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - ym) * (v - ym)).sum();
    let tol = 1e-12 * tss.max(f64::MIN_POSITIVE);

    let line = ols(&x, &y)?;

    struct Best {
        i: usize,
        j: usize,
        coef: Vec<f64>,
        sse: f64,
    }
    let mut best: Option<Best> = None;
    let mut consider = |i: usize, j: usize, coef: Vec<f64>, sse: f64| {
        let better = match &best {
            None => true,
            Some(b) => {
                sse < b.sse - tol || (sse <= b.sse + tol && h[j] - h[i] > h[b.j] - h[b.i])
            }
        };
        if better {
            best = Some(Best { i, j, coef, sse });
        }
    };
    let mut design = Vec::with_capacity(n * 4);
    match model {
        SegmentModel::ThreePiece => {
            for i in 1..n - 1 {
                for j in i + 1..n - 1 {
                    design.clear();
                    for &xv in &x {
                        design.extend_from_slice(&[1.0, xv, hinge(xv, x[i]), hinge(xv, x[j])]);
                    }
                    if let Some((coef, sse)) = least_squares(&design, 4, &y) {
                        consider(i, j, coef, sse);
                    }
                }
            }
        }
        SegmentModel::TwoPiece => {
            for j in 1..n - 1 {
                design.clear();
                for &xv in &x {
                    design.extend_from_slice(&[1.0, xv, hinge(xv, x[j])]);
                }
                if let Some((coef, sse)) = least_squares(&design, 3, &y) {
                    consider(0, j, coef, sse);
                }
            }
        }
    }
    let best = best.ok_or_else(|| Error::FitInfeasible("no admissible pair of kinks".into()))?;
    let c = &best.coef;
    let mut slopes = Vec::with_capacity(c.len() - 1);
    let mut acc = 0.0;
    for v in &c[1..] {
        acc += v;
        slopes.push(acc);
    }
    let (params, win) = match model {
        SegmentModel::ThreePiece => (4.0, slopes[1]),
        SegmentModel::TwoPiece => (3.0, slopes[0]),
    };
    let gain = line.sse - best.sse;
    let f_ratio = (gain / (params - 2.0)) / (best.sse / (n as f64 - params));
    let spans_full_range = gain <= tol || !(f_ratio >= FULL_RANGE_F);
    let window_slope_se = if best.j - best.i >= 2 {
        ols(&x[best.i..=best.j], &y[best.i..=best.j])
            .map(|f| f.se_slope)
            .unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    Ok(WindowEstimate {
        model,
        span,
        tau_uv_hat: h[best.i],
        tau_ir_hat: h[best.j],
        segment_slopes: slopes,
        intercept: c[0],
        sse: best.sse.max(0.0),
        line_sse: line.sse,
        alpha_hat_scale: 1.0 / win,
        window_slope_se,
        spans_full_range,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentifyConfig {
    /// Band half-width as a multiple of the MAD at the smallest horizon.
    pub delta_factor: f64,
    /// Absolute band half-width; overrides `delta_factor`.
    pub delta: Option<f64>,
    pub tau_lo: usize,
    pub tau_hi: usize,
    pub per_decade: usize,
    /// Explicit horizons in steps; replaces the log-spaced grid.
    pub grid: Option<Vec<usize>>,
    /// Search span of the segmented fit; the grid range by default.
    pub span: Option<(usize, usize)>,
    /// Zero selects sandwich standard errors.
    pub replicates: usize,
    /// Bootstrap block length in steps; the longest horizon or `ceil(n^(1/3))`,
    /// whichever is larger, by default.
    pub block_len: Option<usize>,
    pub functional: ScaleFunctional,
    pub model: SegmentModel,
    pub min_scale_size: usize,
    pub min_mass_size: usize,
    pub seed: u64,
}

impl Default for IdentifyConfig {
    fn default() -> Self {
        Self {
            delta_factor: 0.25,
            delta: None,
            tau_lo: 1,
            tau_hi: 128,
            per_decade: 8,
            grid: None,
            span: None,
            replicates: 500,
            block_len: None,
            functional: ScaleFunctional::Mad,
            model: SegmentModel::ThreePiece,
            min_scale_size: 16,
            min_mass_size: 100,
            seed: 0,
        }
    }
}

impl IdentifyConfig {
    pub fn horizons(&self) -> Result<Vec<usize>> {
        match &self.grid {
            Some(g) => Ok(g.clone()),
            None => log_spaced_horizons(self.tau_lo, self.tau_hi, self.per_decade),
        }
    }

    /// Search span of the segmented fit.
    pub fn fit_span(&self) -> Result<(usize, usize)> {
        if let Some(s) = self.span {
            return Ok(s);
        }
        let h = self.horizons()?;
        Ok((h[0], h[h.len() - 1]))
    }

    pub fn default_block_len(&self, n: usize) -> usize {
        let cube = libm::cbrt(n as f64).ceil() as usize;
        let longest = self.horizons().ok().and_then(|h| h.last().copied()).unwrap_or(self.tau_hi);
        longest.max(cube)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    pub horizons: Vec<usize>,
    pub delta: f64,
    pub mass: CentralMassCurve,
    pub slope: SlopeFit,
    pub scale: ScaleCurve,
    pub window: WindowEstimate,
    /// Window slope of the scale curve in `(1/2, 1)`.
    pub window_slope_ok: bool,
    /// `|1/alpha_hat - window slope|` above twice the combined standard error.
    pub inconsistent: bool,
    pub warnings: Vec<String>,
}

impl Identification {
    /// All diagnostics for a Lévy window pass.
    pub fn levy_window(&self) -> bool {
        self.slope.levy_window() && self.window_slope_ok
    }
}

/// Runs the pipeline with bootstrap replicates evaluated in order on the
/// calling thread.
pub fn identify(series: &PriceSeries, cfg: &IdentifyConfig) -> Result<Identification> {
    identify_with(series, cfg, SlopeBootstrap::run_sequential)
}

/// As [`identify`], with the replicates evaluated by `run`, which must
/// return one entry per replicate index in index order.
pub fn identify_with<F>(series: &PriceSeries, cfg: &IdentifyConfig, run: F) -> Result<Identification>
where
    F: FnOnce(&SlopeBootstrap) -> Vec<Option<f64>>,
{
    let horizons = cfg.horizons()?;
    if horizons.is_empty() {
        return Err(Error::DegenerateGrid("no horizons".into()));
    }
    let grid = build_returns_steps(series.log_prices(), &horizons)?;
    let delta = match cfg.delta {
        Some(d) => d,
        None => {
            let base = mad(&grid.returns()[0])?;
            if !(base > 0.0) {
                return Err(Error::DegenerateScale { horizon: horizons[0] });
            }
            cfg.delta_factor * base
        }
    };
    let mass = central_mass(&grid, delta, cfg.min_mass_size)?;
    let mut warnings = Vec::new();
    if !mass.dropped.is_empty() {
        warnings.push(alloc::format!(
            "dropped horizons with empty central band: {:?}",
            mass.dropped
        ));
    }
    let mut slope = fit_slope(&mass)?;
    if cfg.replicates > 0 {
        let block_len = cfg.block_len.unwrap_or_else(|| cfg.default_block_len(series.len()));
        let boot = SlopeBootstrap::new(
            series,
            &mass.horizons,
            delta,
            cfg.min_mass_size,
            block_len,
            cfg.replicates,
            cfg.seed,
        );
        let slopes = run(&boot);
        let (se, failed) = bootstrap_se(&slopes);
        if failed > 0 {
            warnings.push(alloc::format!("{failed} bootstrap replicates were degenerate"));
        }
        slope = slope.with_se(
            se,
            SeMethod::Bootstrap {
                replicates: cfg.replicates,
                block_len,
                failed,
            },
        );
    }

    let scale = scale_curve(&grid, cfg.functional, cfg.min_scale_size)?;
    let span = cfg.fit_span()?;
    let window = two_segment_fit(&scale, span, cfg.model)?;
    let ws = window.window_slope();
    let window_slope_ok = ws > 0.5 && ws < 1.0;
    let combined = (slope.se_slope.powi(2) + window.window_slope_se.powi(2)).sqrt();
    let gap = (1.0 / slope.alpha_hat - ws).abs();
    let inconsistent = combined.is_finite() && gap > 2.0 * combined;
    if window.spans_full_range {
        warnings.push("no cutoff detected inside the span; window spans the full range".into());
    }
    if !slope.in_range {
        warnings.push(alloc::format!(
            "central-mass slope {:.4} outside (-1, -1/2): no Lévy window",
            slope.slope
        ));
    }
    if !window_slope_ok {
        warnings.push(alloc::format!("scale slope {ws:.4} on the fitted window outside (1/2, 1)"));
    }
    if inconsistent {
        warnings.push(alloc::format!(
            "1/alpha_hat = {:.4} and window scale slope {ws:.4} differ by more than two standard errors",
            1.0 / slope.alpha_hat
        ));
    }
    Ok(Identification {
        horizons,
        delta,
        mass,
        slope,
        scale,
        window,
        window_slope_ok,
        inconsistent,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve_from(y: &[f64], horizons: &[usize]) -> CentralMassCurve {
        CentralMassCurve {
            horizons: horizons.to_vec(),
            delta: 1.0,
            p0_hat: y.iter().map(|v| v.exp()).collect(),
            centers: alloc::vec![0.0; y.len()],
            y_values: y.to_vec(),
            sizes: alloc::vec![1000; y.len()],
            dropped: Vec::new(),
        }
    }

    #[test]
    fn affine_data_exact() {
        let hs = [1, 2, 4, 8, 16];
        let y: Vec<f64> = hs.iter().map(|&h| 3.0 - 2.0 / 3.0 * (h as f64).ln()).collect();
        let f = fit_slope(&curve_from(&y, &hs)).unwrap();
        assert!((f.slope + 2.0 / 3.0).abs() < 1e-14);
        assert!((f.alpha_hat - 1.5).abs() < 1e-13);
        assert!(f.sse < 1e-26);
        assert!(f.in_range && f.levy_window());
    }

    #[test]
    fn gaussian_boundary_slope() {
        let hs = [1, 2, 4, 8];
        let y: Vec<f64> = hs.iter().map(|&h| -0.5 * (h as f64).ln()).collect();
        let f = fit_slope(&curve_from(&y, &hs)).unwrap();
        assert!((f.alpha_hat - 2.0).abs() < 1e-13);
        assert!(!f.in_range);
    }

    #[test]
    fn slope_errors() {
        let hs = [1, 2, 4];
        assert!(matches!(
            fit_slope(&curve_from(&[0.0, 0.1, 0.2], &hs)),
            Err(Error::NotLevyWindow { .. })
        ));
        assert!(fit_slope(&curve_from(&[0.0, -0.1], &hs[..2])).is_err());
    }

    #[test]
    fn degenerate_returns_have_full_mass() {
        let grid = build_returns_steps(&[0.5; 200], &[1, 2]).unwrap();
        let c = central_mass(&grid, 0.1, 100).unwrap();
        assert_eq!(c.p0_hat, alloc::vec![1.0, 1.0]);
    }

    #[test]
    fn empty_band_is_dropped() {
        let x: Vec<f64> = (0..301).map(|i| (i * i) as f64).collect();
        let grid = build_returns_steps(&x, &[1, 3]).unwrap();
        assert!(matches!(central_mass(&grid, 1e-3, 100), Err(Error::EstimationImpossible)));
        assert!(central_mass(&grid, 0.0, 100).is_err());
    }

    #[test]
    fn gaussian_population_mass() {
        let p = StableParams::new(2.0, 0.0, 1.0, 0.0).unwrap();
        let m = population_central_mass(&p, 1.0, 1.0).unwrap();
        let exact = 2.0 * crate::special::norm_cdf(1.0 / 2f64.sqrt()) - 1.0;
        assert!((m - exact).abs() < 1e-14);
        assert!((m - 0.520_499_877_813_046_5).abs() < 1e-12);
    }

    fn scale_from(g: &[f64], hs: &[usize]) -> ScaleCurve {
        ScaleCurve {
            horizons: hs.to_vec(),
            s_values: g.iter().map(|v| v.exp()).collect(),
            g_values: g.to_vec(),
            functional: ScaleFunctional::Mad,
        }
    }

    fn piecewise(x: f64) -> f64 {
        let (a, b) = (4f64.ln(), 64f64.ln());
        if x <= a {
            0.9 * x
        } else if x <= b {
            0.9 * a + 2.0 / 3.0 * (x - a)
        } else {
            0.9 * a + 2.0 / 3.0 * (b - a) + 0.5 * (x - b)
        }
    }

    #[test]
    fn noiseless_kinks_recovered() {
        let hs: Vec<usize> = (0..11).map(|k| 1 << k).collect();
        let g: Vec<f64> = hs.iter().map(|&h| piecewise((h as f64).ln())).collect();
        let w = two_segment_fit(&scale_from(&g, &hs), (1, 1024), SegmentModel::ThreePiece).unwrap();
        assert_eq!((w.tau_uv_hat, w.tau_ir_hat), (4, 64));
        assert!(w.sse < 1e-20);
        assert!((w.segment_slopes[0] - 0.9).abs() < 1e-10);
        assert!((w.alpha_hat_scale - 1.5).abs() < 1e-9);
        assert!(!w.spans_full_range);
    }

    #[test]
    fn single_slope_spans_full_range() {
        let hs: Vec<usize> = (0..10).map(|k| 1 << k).collect();
        let g: Vec<f64> = hs.iter().map(|&h| (h as f64).ln() / 1.5).collect();
        let w = two_segment_fit(&scale_from(&g, &hs), (1, 512), SegmentModel::ThreePiece).unwrap();
        assert!(w.spans_full_range);
        assert_eq!((w.tau_uv_hat, w.tau_ir_hat), (2, 256));
    }

    #[test]
    fn two_piece_recovers_ir_kink() {
        let hs: Vec<usize> = (0..11).map(|k| 1 << k).collect();
        let g: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let x = (h as f64).ln();
                x / 1.5 - (x - 32f64.ln()).max(0.0) / 6.0
            })
            .collect();
        let w = two_segment_fit(&scale_from(&g, &hs), (1, 1024), SegmentModel::TwoPiece).unwrap();
        assert_eq!(w.tau_ir_hat, 32);
        assert!((w.window_slope() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn span_too_small() {
        let hs: Vec<usize> = (0..11).map(|k| 1 << k).collect();
        let g: Vec<f64> = hs.iter().map(|&h| (h as f64).ln()).collect();
        assert!(matches!(
            two_segment_fit(&scale_from(&g, &hs), (1, 64), SegmentModel::ThreePiece),
            Err(Error::FitInfeasible(_))
        ));
    }
}
