use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "levy-window", version, about = "Lévy-window estimation and horizon risk reports")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "LEVY_WINDOW_THREADS")]
    pub threads: Option<usize>,
    /// Output file (default: standard output).
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the tail index and the scaling window of a price series.
    #[command(allow_negative_numbers = true)]
    Estimate(EstimateArgs),
    /// Carry risk metrics across horizons, next to a Gaussian surrogate.
    #[command(allow_negative_numbers = true)]
    Metrics(MetricsArgs),
    /// Count threshold exceptions across horizons.
    #[command(allow_negative_numbers = true)]
    Backtest(BacktestArgs),
    /// Write a synthetic log-price series.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Tabulate the standardized stable density and distribution function.
    #[command(allow_negative_numbers = true)]
    StableTable(TableArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub tau_lo: Option<usize>,
    #[arg(long)]
    pub tau_hi: Option<usize>,
    #[arg(long)]
    pub per_decade: Option<usize>,
    /// Explicit horizons in steps, replacing the log-spaced grid.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Band half-width as a multiple of the one-step MAD.
    #[arg(long)]
    pub delta_factor: Option<f64>,
    /// Absolute band half-width in log-price units.
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Bootstrap replicates for the slope SE; 0 gives sandwich SEs.
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub block_len: Option<usize>,
    #[arg(long, value_enum)]
    pub functional: Option<Functional>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Segmented-fit search span `lo,hi` in steps.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub span: Vec<usize>,
    #[arg(long)]
    pub min_scale_size: Option<usize>,
    #[arg(long)]
    pub min_mass_size: Option<usize>,
    /// Anchor horizon for the fitted scale (default: the UV cutoff).
    #[arg(long)]
    pub tau0: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Functional {
    Mad,
    Iqr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    ThreePiece,
    TwoPiece,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Report of `estimate` supplying alpha, sigma, mu, tau0 and the window.
    #[arg(long)]
    pub estimate: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Drift per step.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Benchmark drift per step.
    #[arg(long)]
    pub r: Option<f64>,
    /// Anchor horizon in steps.
    #[arg(long)]
    pub tau0: Option<f64>,
    #[arg(long)]
    pub tau_uv: Option<f64>,
    #[arg(long)]
    pub tau_ir: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Horizons in steps (default: 1, 2, 4, 8, 16 times the anchor).
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<f64>,
    /// Tail levels for VaR, ES and Kelly.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    /// Moment orders for p-Sharpe, p-information ratio and drawdown norms.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Confidence levels for drawdown quantiles.
    #[arg(long, value_delimiter = ',')]
    pub drawdown_q: Vec<f64>,
    #[arg(long, value_enum)]
    pub kelly_law: Option<KellyLawArg>,
    #[arg(long, value_enum)]
    pub propagation: Option<PropagationArg>,
    /// Kelly feasible-set cap used when the VaR is not positive.
    #[arg(long)]
    pub f_cap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KellyLawArg {
    Trimmed,
    RuinTruncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropagationArg {
    Stable,
    SqrtBeyondIr,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Report of `estimate` supplying alpha and the anchor.
    #[arg(long)]
    pub estimate: Option<PathBuf>,
    /// Tail index; estimated from the input when neither this nor an
    /// estimate report is given.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Anchor horizon in steps (default: the estimate's anchor, else 1).
    #[arg(long)]
    pub tau0: Option<usize>,
    /// Horizons in steps (default: 1, 2, 4, 8, 16 times the anchor).
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<usize>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Also backtest drawdown quantiles at this confidence level.
    #[arg(long)]
    pub drawdown_q: Option<f64>,
    #[arg(long, value_enum)]
    pub split: Option<SplitArg>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub min_obs: Option<usize>,
    /// Exit 2 when a levy-mode |z| exceeds this.
    #[arg(long)]
    pub z_bound: Option<f64>,
    /// Block-bootstrap replicates for exception-rate SEs; 0 disables.
    #[arg(long)]
    pub block_replicates: Option<usize>,
    #[arg(long)]
    pub block_len: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    InSample,
    TrainTest,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Number of increments; the series has one more row.
    #[arg(short, long)]
    pub n: Option<usize>,
    /// With `--tau-ir`, simulate the three-regime path.
    #[arg(long)]
    pub tau_uv: Option<usize>,
    #[arg(long)]
    pub tau_ir: Option<usize>,
    /// First timestamp, epoch seconds.
    #[arg(long)]
    pub start: Option<i64>,
    /// Spacing in seconds.
    #[arg(long)]
    pub step: Option<i64>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub z_min: Option<f64>,
    #[arg(long)]
    pub z_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}
