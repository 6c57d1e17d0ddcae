use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use levy_window_core::metrics::{DriftSpec, Propagation};
use levy_window_core::{KellyLaw, MetricValue, RiskModel, StableParams};

use super::{csv_text, parse_choice, Context, Fitted, Outcome};
use crate::cli::{Format, KellyLawArg, MetricsArgs, ModelArgs, PropagationArg};
use crate::config::{pick, pick_list, FileConfig};
use crate::error::{CliError, CliResult};
use crate::report::{fmt_f64, fmt_opt};

#[derive(Debug, Deserialize)]
struct EstimateFile {
    result: EstimateResult,
}

#[derive(Debug, Deserialize)]
struct EstimateResult {
    fitted: Option<Fitted>,
}

pub(crate) fn load_fitted(path: &Path) -> CliResult<Fitted> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::MissingInput {
        path: path.to_path_buf(),
        source,
    })?;
    let file: EstimateFile = serde_json::from_str(&text).map_err(|e| CliError::Data {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: format!("not an estimate report: {e}"),
    })?;
    file.result.fitted.ok_or_else(|| CliError::Data {
        path: path.to_path_buf(),
        line: 0,
        message: "estimate has no fitted parameters (tail index outside (1, 2])".into(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub(crate) struct ModelEcho {
    pub estimate: Option<String>,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mu: f64,
    pub r: f64,
    pub tau0: f64,
    pub tau_uv: Option<f64>,
    pub tau_ir: Option<f64>,
}

impl ModelEcho {
    /// Flags, then the estimate report, then the config file.
    pub fn resolve(args: &ModelArgs, file: &FileConfig) -> CliResult<Self> {
        let est = args.estimate.as_deref().map(load_fitted).transpose()?;
        let m = &file.model;
        let alpha = args
            .alpha
            .or(est.map(|e| e.alpha))
            .or(m.alpha)
            .ok_or_else(|| CliError::Usage("need --alpha or --estimate".into()))?;
        let sigma = args
            .sigma
            .or(est.map(|e| e.sigma))
            .or(m.sigma)
            .ok_or_else(|| CliError::Usage("need --sigma or --estimate".into()))?;
        Ok(Self {
            estimate: args.estimate.as_ref().map(|p| p.display().to_string()),
            alpha,
            beta: args.beta.or(est.map(|e| e.beta)).or(m.beta).unwrap_or(0.0),
            sigma,
            mu: args.mu.or(est.map(|e| e.mu)).or(m.mu).unwrap_or(0.0),
            r: args.r.or(m.r).unwrap_or(0.0),
            tau0: args.tau0.or(est.map(|e| e.tau0)).or(m.tau0).unwrap_or(1.0),
            tau_uv: args.tau_uv.or(est.map(|e| e.tau_uv)).or(m.tau_uv),
            tau_ir: args.tau_ir.or(est.map(|e| e.tau_ir)).or(m.tau_ir),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
struct MetricsConfig {
    model: ModelEcho,
    horizons: Vec<f64>,
    q: Vec<f64>,
    p: Vec<f64>,
    drawdown_q: Vec<f64>,
    kelly_law: &'static str,
    propagation: &'static str,
    f_cap: f64,
}

#[derive(Debug, Serialize)]
struct MetricRow {
    tau: f64,
    level_or_order: f64,
    levy: f64,
    gaussian: f64,
    bias: f64,
    #[serde(rename = "matched_sigma_G")]
    matched_sigma_g: Option<f64>,
    signed_levy: f64,
    matching: &'static str,
    warnings: Vec<String>,
}

impl From<MetricValue> for MetricRow {
    fn from(v: MetricValue) -> Self {
        Self {
            tau: v.tau,
            level_or_order: v.level,
            levy: v.levy,
            gaussian: v.gaussian,
            bias: v.bias,
            matched_sigma_g: v.matched_sigma_g,
            signed_levy: v.signed_levy,
            matching: v.matching.name(),
            warnings: v.warnings,
        }
    }
}

#[derive(Debug, Serialize)]
struct KellyRow {
    tau: f64,
    level: f64,
    law: &'static str,
    f_star: f64,
    /// `null` when the VaR is not positive.
    f_max: Option<f64>,
    upper: f64,
    foc_residual: f64,
    binding: bool,
    growth: f64,
    f_approx: f64,
}

#[derive(Debug, Serialize)]
struct MetricsReport {
    var: Vec<MetricRow>,
    es: Vec<MetricRow>,
    sharpe_p: Vec<MetricRow>,
    info_ratio_p: Vec<MetricRow>,
    drawdown_p: Vec<MetricRow>,
    drawdown_quantile: Vec<MetricRow>,
    kelly: Vec<KellyRow>,
}

fn grid_eval<T: Send>(
    levels: &[f64],
    horizons: &[f64],
    f: impl Fn(f64, f64) -> levy_window_core::Result<T> + Sync,
) -> CliResult<Vec<T>> {
    let pairs: Vec<(f64, f64)> = levels
        .iter()
        .flat_map(|&l| horizons.iter().map(move |&t| (l, t)))
        .collect();
    Ok(pairs
        .into_par_iter()
        .map(|(l, t)| f(l, t))
        .collect::<levy_window_core::Result<Vec<T>>>()?)
}

fn rows(
    levels: &[f64],
    horizons: &[f64],
    f: impl Fn(f64, f64) -> levy_window_core::Result<MetricValue> + Sync,
) -> CliResult<Vec<MetricRow>> {
    Ok(grid_eval(levels, horizons, f)?.into_iter().map(MetricRow::from).collect())
}

pub(crate) fn run(ctx: &Context, args: &MetricsArgs) -> CliResult<Outcome> {
    let file = &ctx.file;
    let model = ModelEcho::resolve(&args.model, file)?;
    let kelly_law = match args.kelly_law {
        Some(k) => k,
        None => match &file.metrics.kelly_law {
            Some(s) => parse_choice("metrics.kelly_law", s)?,
            None => KellyLawArg::Trimmed,
        },
    };
    let kelly_law = match kelly_law {
        KellyLawArg::Trimmed => KellyLaw::Trimmed,
        KellyLawArg::RuinTruncated => KellyLaw::RuinTruncated,
    };
    let propagation = match args.propagation {
        Some(p) => p,
        None => match &file.metrics.propagation {
            Some(s) => parse_choice("metrics.propagation", s)?,
            None => PropagationArg::Stable,
        },
    };
    let (propagation, propagation_name) = match propagation {
        PropagationArg::Stable => (Propagation::Stable, "stable"),
        PropagationArg::SqrtBeyondIr => (Propagation::SqrtBeyondIr, "sqrt-beyond-ir"),
    };
    let t0 = model.tau0;
    let config = MetricsConfig {
        horizons: pick_list(&args.horizons, &file.metrics.horizons, [1.0, 2.0, 4.0, 8.0, 16.0].map(|k| k * t0).to_vec()),
        q: pick_list(&args.q, &file.metrics.q, vec![0.01, 0.05]),
        p: pick_list(&args.p, &file.metrics.p, vec![1.0]),
        drawdown_q: pick_list(&args.drawdown_q, &file.metrics.drawdown_q, vec![0.99]),
        kelly_law: kelly_law.name(),
        propagation: propagation_name,
        f_cap: pick(args.f_cap, file.metrics.f_cap, 1.0),
        model,
    };
    let m = &config.model;

    let params = StableParams::new(m.alpha, m.beta, m.sigma, m.mu)?;
    let mut risk = RiskModel::new(params, m.tau0)?
        .with_drift(DriftSpec::linear(m.mu, m.r))
        .with_propagation(propagation)
        .with_kelly_cap(config.f_cap)?
        .with_abs_moments(&config.p)?;
    match (m.tau_uv, m.tau_ir) {
        (Some(uv), Some(ir)) => risk = risk.with_window(uv, ir)?,
        (None, None) if propagation == Propagation::SqrtBeyondIr => {
            return Err(CliError::Usage("sqrt-beyond-ir propagation needs --tau-uv and --tau-ir".into()))
        }
        (None, None) => {}
        _ => return Err(CliError::Usage("give both --tau-uv and --tau-ir".into())),
    }
    let h = &config.horizons;
    let risk = &risk;
    let report = MetricsReport {
        var: rows(&config.q, h, |q, t| risk.var(t, q))?,
        es: rows(&config.q, h, |q, t| risk.es(t, q))?,
        sharpe_p: rows(&config.p, h, |p, t| risk.sharpe_p(t, p))?,
        info_ratio_p: rows(&config.p, h, |p, t| risk.info_ratio_p(t, p))?,
        drawdown_p: rows(&config.p, h, |p, t| risk.drawdown_p(t, p))?,
        drawdown_quantile: rows(&config.drawdown_q, h, |q, t| risk.drawdown_quantile(t, q))?,
        kelly: grid_eval(&config.q, h, |q, t| {
            let k = risk.kelly(t, q, kelly_law)?;
            Ok(KellyRow {
                tau: t,
                level: q,
                law: kelly_law.name(),
                f_star: k.f_star,
                f_max: k.f_max.is_finite().then_some(k.f_max),
                upper: k.upper,
                foc_residual: k.foc_residual,
                binding: k.binding,
                growth: k.growth,
                f_approx: risk.kelly_approx(t, q)?,
            })
        })?,
    };

    let body = match ctx.format_or(Format::Json) {
        Format::Json => ctx.json("metrics", &config, report),
        Format::Csv => {
            let mut out = Vec::new();
            for (name, list) in [
                ("var", &report.var),
                ("es", &report.es),
                ("sharpe_p", &report.sharpe_p),
                ("info_ratio_p", &report.info_ratio_p),
                ("drawdown_p", &report.drawdown_p),
                ("drawdown_quantile", &report.drawdown_quantile),
            ] {
                for r in list {
                    out.push(vec![
                        name.to_string(),
                        fmt_f64(r.tau),
                        fmt_f64(r.level_or_order),
                        fmt_f64(r.levy),
                        fmt_f64(r.gaussian),
                        fmt_f64(r.bias),
                        fmt_opt(r.matched_sigma_g),
                        r.warnings.join("; "),
                    ]);
                }
            }
            for k in &report.kelly {
                out.push(vec![
                    "kelly".into(),
                    fmt_f64(k.tau),
                    fmt_f64(k.level),
                    fmt_f64(k.f_star),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
            }
            csv_text(
                &["metric", "tau", "level_or_order", "levy", "gaussian", "bias", "matched_sigma_G", "warnings"],
                &out,
            )
        }
    };
    Ok(Outcome::ok(body))
}
