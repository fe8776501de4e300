//! Configuration ingestion, experiment orchestration and dataset emission.
//!
//! Five commands drive the library: `sweep-n` scans the frictionless cycle
//! index (the adiabaticity-versus-n curves), `sweep-ratio` scans the
//! frequency ratio (optimal cycle index and minimum temperature),
//! `tmin` scans the cold frequency (temperature bounds), `run-cycle`
//! simulates one limit cycle, and `adiabat-trace` samples a single ramp
//! trajectory. All of them emit a [`dataset::Dataset`] in CSV, JSON or a
//! gnuplot-friendly table.

pub mod commands;
pub mod config;
pub mod dataset;

pub use config::RunConfig;
pub use dataset::{Dataset, Format, Row, Value};

use crate::Error;

/// CLI-level failures, split by exit-code class: configuration problems
/// exit 1, numeric failures exit 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Numeric(#[from] Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}
