//! Config ingestion, experiment orchestration and result persistence behind
//! the `rcycles` CLI.
//!
//! Exit codes: 0 converged and all checks pass, 1 check failure, 2 no
//! convergence, 3 config error.

pub mod config;
pub mod output;
pub mod run;

use thiserror::Error;

pub use config::{
    load_config, parse_config, OperatorSpec, Overrides, ProblemConfig, SolverSettings,
};
pub use output::{write_outputs, Meta};
pub use run::{
    random_starts, run_duality, run_solve, run_sweep, run_verify, CheckVerdict, RunOutput,
    RunResult, SettingResult, StartSummary, SweepGrid,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error at {field}: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Core(#[from] crate::Error),
}

impl HarnessError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Read { .. }
            | HarnessError::Parse(_)
            | HarnessError::Validation { .. } => run::EXIT_CONFIG,
            HarnessError::Core(crate::Error::NoConvergence(_)) => run::EXIT_NO_CONVERGENCE,
            HarnessError::Write { .. } | HarnessError::Core(_) => run::EXIT_CHECK_FAILED,
        }
    }
}
