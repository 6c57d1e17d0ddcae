use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use levy_window_core::series::{PriceSeries, ScaleFunctional};
use levy_window_core::window::{identify_with, Identification, IdentifyConfig, SeMethod, SegmentModel};
use levy_window_core::{StableDriver, StableParams};

use super::{csv_text, parse_choice, Context, Outcome};
use crate::cli::{EstimateArgs, Format, Functional, Model};
use crate::config::{pick, FileConfig};
use crate::error::{exit, CliResult};
use crate::io::read_series;
use crate::report::fmt_opt;

#[derive(Debug, Clone, Serialize)]
pub(crate) struct EstimateConfig {
    pub input: String,
    pub delta_factor: f64,
    pub delta: Option<f64>,
    pub grid: GridEcho,
    pub bootstrap: BootstrapEcho,
    pub scale: ScaleEcho,
    pub fit: FitEcho,
}

#[derive(Debug, Clone, Serialize)]
pub(crate) struct GridEcho {
    pub tau_lo: usize,
    pub tau_hi: usize,
    pub per_decade: usize,
    pub horizons: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub(crate) struct BootstrapEcho {
    pub replicates: usize,
    pub block_len: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub(crate) struct ScaleEcho {
    pub functional: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub(crate) struct FitEcho {
    pub model: &'static str,
    pub span: Option<(usize, usize)>,
    pub min_scale_size: usize,
    pub min_mass_size: usize,
    pub tau0: Option<usize>,
}

impl EstimateConfig {
    /// Merges flags (when given) over the file over the library defaults.
    pub fn resolve(input: &Path, args: Option<&EstimateArgs>, file: &FileConfig) -> CliResult<Self> {
        let d = IdentifyConfig::default();
        let functional = match args.and_then(|a| a.functional) {
            Some(f) => f,
            None => match &file.scale.functional {
                Some(s) => parse_choice("scale.functional", s)?,
                None => Functional::Mad,
            },
        };
        let model = match args.and_then(|a| a.model) {
            Some(m) => m,
            None => match &file.fit.model {
                Some(s) => parse_choice("fit.model", s)?,
                None => Model::ThreePiece,
            },
        };
        let grid = args
            .map(|a| a.grid.grid.clone())
            .filter(|g| !g.is_empty())
            .or_else(|| file.grid.horizons.clone());
        let span = match args.map(|a| a.span.as_slice()) {
            Some([lo, hi]) => Some((*lo, *hi)),
            _ => file.fit.span,
        };
        Ok(Self {
            input: input.display().to_string(),
            delta_factor: pick(args.and_then(|a| a.delta_factor), file.delta_factor, d.delta_factor),
            delta: args.and_then(|a| a.delta).or(file.delta),
            grid: GridEcho {
                tau_lo: pick(args.and_then(|a| a.grid.tau_lo), file.grid.tau_lo, d.tau_lo),
                tau_hi: pick(args.and_then(|a| a.grid.tau_hi), file.grid.tau_hi, d.tau_hi),
                per_decade: pick(args.and_then(|a| a.grid.per_decade), file.grid.per_decade, d.per_decade),
                horizons: grid,
            },
            bootstrap: BootstrapEcho {
                replicates: pick(args.and_then(|a| a.replicates), file.bootstrap.replicates, d.replicates),
                block_len: args.and_then(|a| a.block_len).or(file.bootstrap.block_len),
            },
            scale: ScaleEcho {
                functional: match functional {
                    Functional::Mad => "mad",
                    Functional::Iqr => "iqr",
                },
            },
            fit: FitEcho {
                model: match model {
                    Model::ThreePiece => SegmentModel::ThreePiece.name(),
                    Model::TwoPiece => SegmentModel::TwoPiece.name(),
                },
                span,
                min_scale_size: pick(args.and_then(|a| a.min_scale_size), file.fit.min_scale_size, d.min_scale_size),
                min_mass_size: pick(args.and_then(|a| a.min_mass_size), file.fit.min_mass_size, d.min_mass_size),
                tau0: args.and_then(|a| a.tau0).or(file.fit.tau0),
            },
        })
    }

    pub fn identify_config(&self, seed: u64) -> IdentifyConfig {
        IdentifyConfig {
            delta_factor: self.delta_factor,
            delta: self.delta,
            tau_lo: self.grid.tau_lo,
            tau_hi: self.grid.tau_hi,
            per_decade: self.grid.per_decade,
            grid: self.grid.horizons.clone(),
            span: self.fit.span,
            replicates: self.bootstrap.replicates,
            block_len: self.bootstrap.block_len,
            functional: self.functional(),
            model: if self.fit.model == SegmentModel::TwoPiece.name() {
                SegmentModel::TwoPiece
            } else {
                SegmentModel::ThreePiece
            },
            min_scale_size: self.fit.min_scale_size,
            min_mass_size: self.fit.min_mass_size,
            seed,
        }
    }

    fn functional(&self) -> ScaleFunctional {
        if self.scale.functional == "iqr" {
            ScaleFunctional::Iqr
        } else {
            ScaleFunctional::Mad
        }
    }
}

/// Runs identification with the bootstrap replicates spread over the pool.
pub(crate) fn identify_parallel(series: &PriceSeries, cfg: &IdentifyConfig) -> levy_window_core::Result<Identification> {
    identify_with(series, cfg, |b| {
        (0..b.replicates()).into_par_iter().map(|i| b.replicate(i)).collect()
    })
}

/// Stable parameters implied by the estimate: `alpha_hat`, symmetric,
/// scale matched to the scale curve at the anchor, drift from the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fitted {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    /// Per step.
    pub mu: f64,
    /// Anchor horizon in steps.
    pub tau0: f64,
    pub tau_uv: f64,
    pub tau_ir: f64,
    /// Base step in timestamp units.
    pub step: f64,
}

fn fitted(series: &PriceSeries, id: &Identification, tau0: Option<usize>) -> CliResult<Option<Fitted>> {
    let alpha = id.slope.alpha_hat;
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Ok(None);
    }
    let target = (tau0.unwrap_or(id.window.tau_uv_hat) as f64).ln();
    let scale = &id.scale;
    let i = (0..scale.horizons.len())
        .min_by(|&a, &b| {
            let da = ((scale.horizons[a] as f64).ln() - target).abs();
            let db = ((scale.horizons[b] as f64).ln() - target).abs();
            da.total_cmp(&db)
        })
        .expect("scale curve is never empty");
    let h = scale.horizons[i] as f64;
    let driver = StableDriver::new(&StableParams::standard(alpha, 0.0)?);
    let z = match scale.functional {
        ScaleFunctional::Mad => driver.mad()?,
        ScaleFunctional::Iqr => driver.quantile(0.75)? - driver.quantile(0.25)?,
    };
    let x = series.log_prices();
    Ok(Some(Fitted {
        alpha,
        beta: 0.0,
        sigma: scale.s_values[i] / (h.powf(1.0 / alpha) * z),
        mu: (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64,
        tau0: h,
        tau_uv: id.window.tau_uv_hat as f64,
        tau_ir: id.window.tau_ir_hat as f64,
        step: series.step(),
    }))
}

#[derive(Debug, Serialize)]
struct SeriesSummary {
    rows: usize,
    step: f64,
    first_timestamp: f64,
    last_timestamp: f64,
}

#[derive(Debug, Serialize)]
struct MassReport<'a> {
    delta: f64,
    horizons: &'a [usize],
    p0_hat: &'a [f64],
    centers: &'a [f64],
    y_values: &'a [f64],
    sizes: &'a [usize],
    dropped: &'a [usize],
}

#[derive(Debug, Serialize)]
struct SlopeReport {
    slope: f64,
    intercept: f64,
    alpha_hat: f64,
    se_slope: f64,
    se_alpha: f64,
    se_method: &'static str,
    bootstrap_replicates: Option<usize>,
    block_len: Option<usize>,
    failed_replicates: Option<usize>,
    sse: f64,
    n_horizons: usize,
}

#[derive(Debug, Serialize)]
struct ScaleReport<'a> {
    functional: &'static str,
    horizons: &'a [usize],
    s_values: &'a [f64],
    g_values: &'a [f64],
}

#[derive(Debug, Serialize)]
struct WindowReport<'a> {
    model: &'static str,
    span: (usize, usize),
    tau_uv_hat: usize,
    tau_ir_hat: usize,
    /// In timestamp units.
    tau_uv_time: f64,
    tau_ir_time: f64,
    segment_slopes: &'a [f64],
    window_slope: f64,
    intercept: f64,
    sse: f64,
    line_sse: f64,
    alpha_hat_scale: f64,
    window_slope_se: f64,
    spans_full_range: bool,
}

#[derive(Debug, Serialize)]
struct Diagnostics<'a> {
    in_range: bool,
    slope_clear_of_gaussian: bool,
    window_slope_ok: bool,
    inconsistent: bool,
    levy_window: bool,
    warnings: &'a [String],
}

#[derive(Debug, Serialize)]
struct EstimateReport<'a> {
    series: SeriesSummary,
    central_mass: MassReport<'a>,
    slope_fit: SlopeReport,
    scale_curve: ScaleReport<'a>,
    window: WindowReport<'a>,
    diagnostics: Diagnostics<'a>,
    fitted: Option<Fitted>,
}

pub(crate) fn run(ctx: &Context, args: &EstimateArgs) -> CliResult<Outcome> {
    let config = EstimateConfig::resolve(&args.input, Some(args), &ctx.file)?;
    let series = read_series(&args.input)?;
    let id = identify_parallel(&series, &config.identify_config(ctx.seed))?;
    let fitted = fitted(&series, &id, config.fit.tau0)?;

    let mut notes = Vec::new();
    let passed = id.levy_window();
    if !passed {
        let mut why = Vec::new();
        if !id.slope.in_range {
            why.push(format!("central-mass slope {:.4} outside (-1, -1/2)", id.slope.slope));
        } else if !id.slope.levy_window() {
            why.push(format!(
                "central-mass slope {:.4} within 3 SE ({:.4}) of the Gaussian -1/2",
                id.slope.slope, id.slope.se_slope
            ));
        }
        if !id.window_slope_ok {
            why.push(format!("window scale slope {:.4} outside (1/2, 1)", id.window.window_slope()));
        }
        notes.push(format!("no Lévy window: {}", why.join("; ")));
    }

    let body = match ctx.format_or(Format::Json) {
        Format::Json => {
            let s = &id.slope;
            let (se_method, reps, block, failed) = match s.se_method {
                SeMethod::Sandwich => ("sandwich", None, None, None),
                SeMethod::Bootstrap {
                    replicates,
                    block_len,
                    failed,
                } => ("block-bootstrap", Some(replicates), Some(block_len), Some(failed)),
            };
            let w = &id.window;
            let report = EstimateReport {
                series: SeriesSummary {
                    rows: series.len(),
                    step: series.step(),
                    first_timestamp: series.timestamps()[0],
                    last_timestamp: series.timestamps()[series.len() - 1],
                },
                central_mass: MassReport {
                    delta: id.delta,
                    horizons: &id.mass.horizons,
                    p0_hat: &id.mass.p0_hat,
                    centers: &id.mass.centers,
                    y_values: &id.mass.y_values,
                    sizes: &id.mass.sizes,
                    dropped: &id.mass.dropped,
                },
                slope_fit: SlopeReport {
                    slope: s.slope,
                    intercept: s.intercept,
                    alpha_hat: s.alpha_hat,
                    se_slope: s.se_slope,
                    se_alpha: s.se_alpha,
                    se_method,
                    bootstrap_replicates: reps,
                    block_len: block,
                    failed_replicates: failed,
                    sse: s.sse,
                    n_horizons: s.n_horizons,
                },
                scale_curve: ScaleReport {
                    functional: id.scale.functional.name(),
                    horizons: &id.scale.horizons,
                    s_values: &id.scale.s_values,
                    g_values: &id.scale.g_values,
                },
                window: WindowReport {
                    model: w.model.name(),
                    span: w.span,
                    tau_uv_hat: w.tau_uv_hat,
                    tau_ir_hat: w.tau_ir_hat,
                    tau_uv_time: w.tau_uv_hat as f64 * series.step(),
                    tau_ir_time: w.tau_ir_hat as f64 * series.step(),
                    segment_slopes: &w.segment_slopes,
                    window_slope: w.window_slope(),
                    intercept: w.intercept,
                    sse: w.sse,
                    line_sse: w.line_sse,
                    alpha_hat_scale: w.alpha_hat_scale,
                    window_slope_se: w.window_slope_se,
                    spans_full_range: w.spans_full_range,
                },
                diagnostics: Diagnostics {
                    in_range: s.in_range,
                    slope_clear_of_gaussian: s.levy_window(),
                    window_slope_ok: id.window_slope_ok,
                    inconsistent: id.inconsistent,
                    levy_window: passed,
                    warnings: &id.warnings,
                },
                fitted,
            };
            ctx.json("estimate", &config, report)
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = id
                .horizons
                .iter()
                .map(|&h| {
                    let m = id.mass.horizons.iter().position(|&x| x == h);
                    let c = id.scale.horizons.iter().position(|&x| x == h);
                    vec![
                        h.to_string(),
                        fmt_opt(m.map(|i| id.mass.p0_hat[i])),
                        fmt_opt(m.map(|i| id.mass.y_values[i])),
                        m.map(|i| id.mass.sizes[i].to_string()).unwrap_or_default(),
                        fmt_opt(c.map(|i| id.scale.s_values[i])),
                        fmt_opt(c.map(|i| id.scale.g_values[i])),
                    ]
                })
                .collect();
            csv_text(&["tau", "p0_hat", "log_p0_hat", "size", "scale", "log_scale"], &rows)
        }
    };
    Ok(Outcome {
        body,
        code: if passed { exit::OK } else { exit::DIAGNOSTICS },
        notes,
    })
}
