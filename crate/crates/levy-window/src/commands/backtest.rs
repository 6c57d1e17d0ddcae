use rayon::prelude::*;
use serde::Serialize;

use levy_window_core::backtest::{
    backtest_drawdown, backtest_var, exception_block_se, z_trend, BacktestConfig, BacktestResult, Mode, Split,
    MIN_BACKTEST_OBS,
};

use super::estimate::{identify_parallel, EstimateConfig};
use super::metrics::load_fitted;
use super::{csv_text, parse_choice, Context, Outcome};
use crate::cli::{BacktestArgs, Format, SplitArg};
use crate::config::{pick, pick_list};
use crate::error::{exit, CliResult};
use crate::io::read_series;
use crate::report::{fmt_f64, fmt_opt};

#[derive(Debug, Serialize)]
struct BacktestEcho {
    input: String,
    alpha: f64,
    alpha_source: &'static str,
    tau0: usize,
    horizons: Vec<usize>,
    q: f64,
    drawdown_q: Option<f64>,
    split: &'static str,
    train_fraction: Option<f64>,
    min_obs: usize,
    z_bound: f64,
    block_replicates: usize,
    block_len: usize,
}

#[derive(Debug, Serialize)]
struct Row {
    metric: &'static str,
    mode: &'static str,
    tau: usize,
    level: f64,
    nominal: f64,
    n_obs: usize,
    n_exceptions: usize,
    exception_rate: f64,
    /// A lower bound: overlapping windows make exceptions cluster.
    binomial_se: f64,
    z_score: f64,
    block_se: Option<f64>,
    block_z: Option<f64>,
    threshold: f64,
    degenerate_threshold: bool,
}

#[derive(Debug, Serialize)]
struct Trend {
    metric: &'static str,
    mode: &'static str,
    spearman_rho: f64,
    critical: f64,
    flat: bool,
}

#[derive(Debug, Serialize)]
struct Gate {
    z_bound: f64,
    max_abs_levy_z: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct BacktestReport {
    results: Vec<Row>,
    trend: Vec<Trend>,
    gate: Gate,
    warnings: Vec<String>,
}

pub(crate) fn run(ctx: &Context, args: &BacktestArgs) -> CliResult<Outcome> {
    let file = &ctx.file;
    let b = &file.backtest;
    let series = read_series(&args.input)?;
    let mut warnings = Vec::new();

    let fitted = args.estimate.as_deref().map(load_fitted).transpose()?;
    let (mut alpha, alpha_source) = if let Some(a) = args.alpha {
        (a, "flag")
    } else if let Some(f) = fitted {
        (f.alpha, "estimate")
    } else if let Some(a) = file.model.alpha {
        (a, "config")
    } else {
        let cfg = EstimateConfig::resolve(&args.input, None, file)?;
        let mut icfg = cfg.identify_config(ctx.seed);
        icfg.replicates = 0;
        (identify_parallel(&series, &icfg)?.slope.alpha_hat, "identified")
    };
    if alpha_source == "identified" && alpha > 2.0 {
        warnings.push(format!("estimated tail index {alpha:.4} above 2; using 2"));
        alpha = 2.0;
    }

    let tau0 = args
        .tau0
        .or(fitted.map(|f| f.tau0.round() as usize))
        .or(b.tau0)
        .unwrap_or(1);
    let horizons = pick_list(&args.horizons, &b.horizons, [1, 2, 4, 8, 16].map(|k| k * tau0).to_vec());
    let split = match args.split {
        Some(s) => s,
        None => match &b.split {
            Some(s) => parse_choice("backtest.split", s)?,
            None => SplitArg::TrainTest,
        },
    };
    let train_fraction = pick(args.train_fraction, b.train_fraction, 0.5);
    let n = series.len();
    let longest = horizons.iter().copied().max().unwrap_or(1);
    let echo = BacktestEcho {
        input: args.input.display().to_string(),
        alpha,
        alpha_source,
        tau0,
        q: pick(args.q, b.q, 0.01),
        drawdown_q: args.drawdown_q.or(b.drawdown_q),
        split: match split {
            SplitArg::InSample => "in-sample",
            SplitArg::TrainTest => "train-test",
        },
        train_fraction: (split == SplitArg::TrainTest).then_some(train_fraction),
        min_obs: pick(args.min_obs, b.min_obs, MIN_BACKTEST_OBS),
        z_bound: pick(args.z_bound, b.z_bound, 3.0),
        block_replicates: pick(args.block_replicates, b.block_replicates, 0),
        block_len: pick(args.block_len, b.block_len, longest.max((n as f64).cbrt().ceil() as usize)),
        horizons,
    };

    let mut cfg = BacktestConfig::new(echo.alpha, echo.tau0, echo.horizons.clone());
    cfg.split = match split {
        SplitArg::InSample => Split::InSample,
        SplitArg::TrainTest => Split::TrainTest { train_fraction },
    };
    cfg.min_obs = echo.min_obs;

    let x = series.log_prices();
    let mut sets: Vec<(&'static str, f64, Vec<BacktestResult>)> = vec![("var", echo.q, backtest_var(x, echo.q, &cfg)?)];
    if let Some(dq) = echo.drawdown_q {
        sets.push(("drawdown", dq, backtest_drawdown(x, dq, &cfg)?));
    }

    let mut trend = Vec::new();
    for (metric, _, results) in &sets {
        for mode in [Mode::Levy, Mode::Gaussian] {
            let part: Vec<BacktestResult> = results.iter().filter(|r| r.mode == mode).copied().collect();
            if let Some(t) = z_trend(&part) {
                trend.push(Trend {
                    metric,
                    mode: mode.name(),
                    spearman_rho: t.rho,
                    critical: t.critical,
                    flat: t.flat(),
                });
            }
        }
    }

    let flat: Vec<(&'static str, f64, BacktestResult)> = sets
        .iter()
        .flat_map(|(m, level, rs)| rs.iter().map(move |r| (*m, *level, *r)))
        .collect();
    let rows: Vec<Row> = flat
        .into_par_iter()
        .map(|(metric, level, r)| -> CliResult<Row> {
            // Drawdown events at confidence `level` are VaR exceptions at `1 - level`.
            let block_se = if echo.block_replicates > 0 && metric == "var" {
                Some(exception_block_se(
                    x,
                    level,
                    r.tau,
                    &cfg,
                    r.mode,
                    echo.block_len,
                    echo.block_replicates,
                    ctx.seed,
                )?)
            } else {
                None
            };
            Ok(Row {
                metric,
                mode: r.mode.name(),
                tau: r.tau,
                level: r.level,
                nominal: r.nominal,
                n_obs: r.n_obs,
                n_exceptions: r.n_exceptions,
                exception_rate: r.exception_rate,
                binomial_se: r.binomial_se,
                z_score: r.z_score,
                block_se,
                block_z: block_se.map(|s| (r.exception_rate - r.nominal) / s),
                threshold: r.threshold,
                degenerate_threshold: r.degenerate_threshold,
            })
        })
        .collect::<CliResult<_>>()?;

    let levy_z: Vec<f64> = rows.iter().filter(|r| r.mode == Mode::Levy.name()).map(|r| r.z_score).collect();
    if levy_z.iter().any(|z| !z.is_finite()) {
        warnings.push("some levy-mode z-scores are undefined (zero binomial SE)".into());
    }
    let max_abs = levy_z.iter().filter(|z| z.is_finite()).fold(0.0f64, |m, z| m.max(z.abs()));
    let passed = max_abs <= echo.z_bound;
    let mut notes = Vec::new();
    if !passed {
        notes.push(format!(
            "levy-mode |z| = {max_abs:.3} exceeds the bound {}",
            echo.z_bound
        ));
    }

    let body = match ctx.format_or(Format::Json) {
        Format::Json => ctx.json(
            "backtest",
            &echo,
            BacktestReport {
                results: rows,
                trend,
                gate: Gate {
                    z_bound: echo.z_bound,
                    max_abs_levy_z: max_abs,
                    passed,
                },
                warnings,
            },
        ),
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.metric.into(),
                        r.mode.into(),
                        r.tau.to_string(),
                        fmt_f64(r.level),
                        fmt_f64(r.nominal),
                        r.n_obs.to_string(),
                        r.n_exceptions.to_string(),
                        fmt_f64(r.exception_rate),
                        fmt_f64(r.binomial_se),
                        fmt_f64(r.z_score),
                        fmt_opt(r.block_se),
                        fmt_opt(r.block_z),
                        fmt_f64(r.threshold),
                        r.degenerate_threshold.to_string(),
                    ]
                })
                .collect();
            csv_text(
                &[
                    "metric",
                    "mode",
                    "tau",
                    "level",
                    "nominal",
                    "n_obs",
                    "n_exceptions",
                    "exception_rate",
                    "binomial_se",
                    "z_score",
                    "block_se",
                    "block_z",
                    "threshold",
                    "degenerate_threshold",
                ],
                &table,
            )
        }
    };
    Ok(Outcome {
        body,
        code: if passed { exit::OK } else { exit::DIAGNOSTICS },
        notes,
    })
}
