use std::path::PathBuf;

use levy_window_core::Error as CoreError;

/// Process exit codes, following the BSD `sysexits` numbering.
pub mod exit {
    pub const OK: i32 = 0;
    /// Report written, but the diagnostics or a gate failed.
    pub const DIAGNOSTICS: i32 = 2;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const NO_INPUT: i32 = 66;
    pub const SOFTWARE: i32 = 70;
    pub const IO: i32 = 74;
    pub const CONFIG: i32 = 78;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    MissingInput {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Data {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("cannot write {target}: {source}")]
    Output {
        target: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::MissingInput { .. } => exit::NO_INPUT,
            Self::Data { .. } => exit::DATA,
            Self::Usage(_) => exit::USAGE,
            Self::Config(_) => exit::CONFIG,
            Self::Output { .. } => exit::IO,
            Self::Core(e) => match e {
                CoreError::SeriesTooShort { .. }
                | CoreError::UnevenSpacing { .. }
                | CoreError::EmptySample
                | CoreError::DegenerateScale { .. }
                | CoreError::SampleTooSmall { .. } => exit::DATA,
                CoreError::InvalidParameter { .. }
                | CoreError::MomentDivergence { .. }
                | CoreError::NonIntegerHorizon { .. }
                | CoreError::HorizonExceedsSpan { .. }
                | CoreError::DegenerateGrid(_) => exit::CONFIG,
                CoreError::NotLevyWindow { .. } => exit::DIAGNOSTICS,
                CoreError::Quadrature { .. }
                | CoreError::RootNotBracketed(_)
                | CoreError::EstimationImpossible
                | CoreError::FitInfeasible(_)
                | CoreError::NonConcave => exit::SOFTWARE,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
