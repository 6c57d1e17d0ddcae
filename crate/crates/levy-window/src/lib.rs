//! Command-line front end of the Lévy-window toolkit: CSV ingestion, TOML
//! configuration and JSON/CSV reports over `levy-window-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
