//! Optional TOML configuration file. Every key has a command-line flag of
//! the same meaning; flags win.
//!
//! ```toml
//! seed = 7
//! delta_factor = 0.25
//!
//! [grid]
//! tau_lo = 1
//! tau_hi = 128
//! per_decade = 8
//!
//! [bootstrap]
//! replicates = 500
//! block_len = 128
//!
//! [scale]
//! functional = "mad"
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<String>,
    pub delta_factor: Option<f64>,
    pub delta: Option<f64>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub bootstrap: BootstrapSection,
    #[serde(default)]
    pub scale: ScaleSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub backtest: BacktestSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub table: TableSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub tau_lo: Option<usize>,
    pub tau_hi: Option<usize>,
    pub per_decade: Option<usize>,
    pub horizons: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSection {
    pub replicates: Option<usize>,
    pub block_len: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSection {
    pub functional: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub model: Option<String>,
    pub span: Option<(usize, usize)>,
    pub min_scale_size: Option<usize>,
    pub min_mass_size: Option<usize>,
    pub tau0: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub sigma: Option<f64>,
    pub mu: Option<f64>,
    pub r: Option<f64>,
    pub tau0: Option<f64>,
    pub tau_uv: Option<f64>,
    pub tau_ir: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    pub horizons: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub drawdown_q: Option<Vec<f64>>,
    pub kelly_law: Option<String>,
    pub propagation: Option<String>,
    pub f_cap: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BacktestSection {
    pub tau0: Option<usize>,
    pub horizons: Option<Vec<usize>>,
    pub q: Option<f64>,
    pub drawdown_q: Option<f64>,
    pub split: Option<String>,
    pub train_fraction: Option<f64>,
    pub min_obs: Option<usize>,
    pub z_bound: Option<f64>,
    pub block_replicates: Option<usize>,
    pub block_len: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub sigma: Option<f64>,
    pub mu: Option<f64>,
    pub n: Option<usize>,
    pub tau_uv: Option<usize>,
    pub tau_ir: Option<usize>,
    pub start: Option<i64>,
    pub step: Option<i64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub points: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::MissingInput {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// First of flag, file, default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// As [`pick`] for list flags, where an empty list means unset.
pub fn pick_list<T: Clone>(flag: &[T], file: &Option<Vec<T>>, default: Vec<T>) -> Vec<T> {
    if !flag.is_empty() {
        flag.to_vec()
    } else {
        file.clone().unwrap_or(default)
    }
}
