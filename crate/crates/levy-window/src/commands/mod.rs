mod backtest;
mod estimate;
mod metrics;
mod simulate;

use serde::Serialize;

use crate::cli::{Cli, Command, Format};
use crate::config::{pick, FileConfig};
use crate::error::{exit, CliError, CliResult};
use crate::report::{to_json, Envelope};

pub use estimate::Fitted;

/// What a command produced: the report body, the exit code and messages
/// for standard error.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub code: i32,
    pub notes: Vec<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self {
            body,
            code: exit::OK,
            notes: Vec::new(),
        }
    }
}

pub(crate) struct Context {
    pub file: FileConfig,
    pub seed: u64,
    pub format: Option<Format>,
}

impl Context {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn json<C: Serialize, R: Serialize>(&self, command: &str, config: &C, result: R) -> String {
        to_json(&Envelope::new(command, self.seed, config, result))
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let format = match (cli.global.format, file.format.as_deref()) {
        (Some(f), _) => Some(f),
        (None, None) => None,
        (None, Some("json")) => Some(Format::Json),
        (None, Some("csv")) => Some(Format::Csv),
        (None, Some(other)) => return Err(CliError::Config(format!("unknown format `{other}`"))),
    };
    let ctx = Context {
        seed: pick(cli.global.seed, file.seed, 0),
        file,
        format,
    };
    match &cli.command {
        Command::Estimate(a) => estimate::run(&ctx, a),
        Command::Metrics(a) => metrics::run(&ctx, a),
        Command::Backtest(a) => backtest::run(&ctx, a),
        Command::Simulate(a) => simulate::run_simulate(&ctx, a),
        Command::StableTable(a) => simulate::run_table(&ctx, a),
    }
}

/// Worker count: flag or environment, then the config file, then the
/// available parallelism.
pub fn threads(cli: &Cli) -> CliResult<usize> {
    let from_file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?.threads,
        None => None,
    };
    let n = cli
        .global
        .threads
        .or(from_file)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    Ok(n)
}

fn parse_choice<T: clap::ValueEnum>(key: &str, value: &str) -> CliResult<T> {
    T::from_str(value, true).map_err(|_| CliError::Config(format!("unknown {key} `{value}`")))
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut buf = Vec::new();
    crate::io::write_table(&mut buf, header, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv writes UTF-8")
}
