use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("moment of order {p} diverges for tail index {alpha}")]
    MomentDivergence { p: f64, alpha: f64 },
    #[error("quadrature for {what} did not converge (error estimate {abs_error:e})")]
    Quadrature { what: &'static str, abs_error: f64 },
    #[error("root search for {0} failed")]
    RootNotBracketed(&'static str),
    #[error("series too short: {len} observations, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },
    #[error("timestamps not equally spaced at index {index}")]
    UnevenSpacing { index: usize },
    #[error("horizon {horizon} is not a positive integer multiple of the base step")]
    NonIntegerHorizon { horizon: f64 },
    #[error("horizon {horizon} steps exceeds the series span of {span} steps")]
    HorizonExceedsSpan { horizon: usize, span: usize },
    #[error("horizon grid is degenerate: {0}")]
    DegenerateGrid(String),
    #[error("horizon {horizon}: sample of {size} returns is below the floor of {min}")]
    SampleTooSmall { horizon: usize, size: usize, min: usize },
    #[error("horizon {horizon}: returns have zero dispersion")]
    DegenerateScale { horizon: usize },
    #[error("central mass is zero at every horizon; widen delta")]
    EstimationImpossible,
    #[error("slope {slope} shows no decay of the central mass; not a Levy window")]
    NotLevyWindow { slope: f64 },
    #[error("two-segment fit infeasible: {0}")]
    FitInfeasible(String),
    #[error("empty sample")]
    EmptySample,
    #[error("log-growth is not concave on the feasible set")]
    NonConcave,
}
