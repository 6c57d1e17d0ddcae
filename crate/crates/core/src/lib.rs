//! Finite-horizon Lévy-stable scaling of log returns.
//!
//! The crate estimates a tail index `alpha` and the horizon window on which
//! returns scale as `tau^(1/alpha)`, then carries VaR, expected shortfall,
//! p-Sharpe, p-information ratio, VaR-constrained Kelly and one-step
//! drawdown across horizons, next to a `sqrt(tau)` Gaussian surrogate.
//!
//! `no_std` with `alloc`; file formats and the command line live in the
//! `levy-window` crate.

#![no_std]

extern crate alloc;

pub mod backtest;
pub mod error;
pub mod kelly;
pub mod metrics;
pub mod quad;
pub mod roots;
pub mod series;
pub mod special;
pub mod stable;
pub mod stats;
pub mod window;

pub use error::{Error, Result};
pub use kelly::{KellyLaw, KellyResult};
pub use metrics::{AnchorConstants, Drift, DriftSpec, MetricValue, RiskModel};
pub use stable::{
    stable_cdf, stable_pdf, stable_quantile, MomentConstants, StableDriver, StableParams,
    TailConstants,
};
