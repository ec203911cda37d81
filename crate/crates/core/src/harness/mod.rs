//! Scenario-driven experiment runner: ingestion, noise sweeps and reports.

mod noise;
mod report;
mod run;
mod scenario;

use std::path::PathBuf;

use thiserror::Error;

pub use noise::{noise_sweep, perturb_schedule, sample_rng, NoiseKind, NoiseModel};
pub use report::{
    emit, parse_report, stats, DeltaReport, NoiseReport, OutputFormat, QuantitySamples, RunReport, Stats,
};
pub use run::{run_scenario, run_scenario_file, Overrides};
pub use scenario::{load_scenario, parse_scenario, Analysis, Scenario, ScheduleSpec, StateSpec, SCENARIO_VERSION};

/// Failures of the runner, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::Error),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Schema { path: path.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Schema { .. } => 2,
            HarnessError::Numerical(_) => 3,
            HarnessError::Io { .. } => 4,
        }
    }
}
