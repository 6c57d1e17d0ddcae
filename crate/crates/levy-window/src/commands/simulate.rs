use rayon::prelude::*;
use serde::Serialize;

use levy_window_core::series::{simulate_two_regime, simulate_window};
use levy_window_core::{StableDriver, StableParams};

use super::{csv_text, Context, Outcome};
use crate::cli::{Format, SimulateArgs, TableArgs};
use crate::config::pick;
use crate::error::{CliError, CliResult};
use crate::io::write_series;
use crate::report::fmt_f64;

pub(crate) fn run_simulate(ctx: &Context, args: &SimulateArgs) -> CliResult<Outcome> {
    if ctx.format == Some(Format::Json) {
        return Err(CliError::Usage("simulate writes CSV only".into()));
    }
    let f = &ctx.file.simulate;
    let params = StableParams::new(
        pick(args.alpha, f.alpha, 1.5),
        pick(args.beta, f.beta, 0.0),
        pick(args.sigma, f.sigma, 0.01),
        pick(args.mu, f.mu, 0.0),
    )?;
    let n = pick(args.n, f.n, 100_000);
    let series = match (args.tau_uv.or(f.tau_uv), args.tau_ir.or(f.tau_ir)) {
        (Some(uv), Some(ir)) => simulate_two_regime(&params, uv, ir, n, ctx.seed)?,
        (None, None) => simulate_window(&params, n, ctx.seed)?,
        _ => return Err(CliError::Usage("give both --tau-uv and --tau-ir".into())),
    };
    let step = pick(args.step, f.step, 1);
    if step <= 0 {
        return Err(CliError::Usage("--step must be positive".into()));
    }
    let mut buf = Vec::new();
    write_series(&mut buf, pick(args.start, f.start, 0), step, series.log_prices())
        .expect("writing to memory cannot fail");
    Ok(Outcome::ok(String::from_utf8(buf).expect("csv writes UTF-8")))
}

#[derive(Debug, Serialize)]
struct TableEcho {
    alpha: f64,
    beta: f64,
    z_min: f64,
    z_max: f64,
    points: usize,
}

#[derive(Debug, Serialize)]
struct TableRow {
    z: f64,
    pdf: f64,
    cdf: f64,
}

pub(crate) fn run_table(ctx: &Context, args: &TableArgs) -> CliResult<Outcome> {
    let f = &ctx.file.table;
    let echo = TableEcho {
        alpha: pick(args.alpha, f.alpha, 1.5),
        beta: pick(args.beta, f.beta, 0.0),
        z_min: pick(args.z_min, f.z_min, -10.0),
        z_max: pick(args.z_max, f.z_max, 10.0),
        points: pick(args.points, f.points, 201),
    };
    if !(echo.z_max > echo.z_min) || echo.points < 2 {
        return Err(CliError::Usage("need z_min < z_max and at least 2 points".into()));
    }
    let driver = StableDriver::new(&StableParams::standard(echo.alpha, echo.beta)?);
    let h = (echo.z_max - echo.z_min) / (echo.points - 1) as f64;
    let rows = (0..echo.points)
        .into_par_iter()
        .map(|i| {
            let z = if i + 1 == echo.points { echo.z_max } else { echo.z_min + h * i as f64 };
            Ok(TableRow {
                z,
                pdf: driver.pdf(z)?,
                cdf: driver.cdf(z)?,
            })
        })
        .collect::<levy_window_core::Result<Vec<_>>>()?;
    let body = match ctx.format_or(Format::Csv) {
        Format::Json => ctx.json("stable-table", &echo, rows),
        Format::Csv => csv_text(
            &["z", "pdf", "cdf"],
            &rows
                .iter()
                .map(|r| vec![fmt_f64(r.z), fmt_f64(r.pdf), fmt_f64(r.cdf)])
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Outcome::ok(body))
}
