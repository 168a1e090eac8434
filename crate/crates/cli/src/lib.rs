//! Command-line experiment harness: graph generation, single runs, sweeps
//! and t-local broadcast over saved spanners.

pub mod args;
pub mod commands;
pub mod record;

use std::path::PathBuf;

use thiserror::Error;

pub use args::Cli;
pub use record::{execute, GraphDescriptor, Mode, RunOutput, RunRecord, SpannerRecord};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Graph {
        path: PathBuf,
        #[source]
        source: spansim_core::graph::GraphError,
    },
    #[error(transparent)]
    Generate(#[from] spansim_core::generate::GenerateError),
    #[error(transparent)]
    Sampler(#[from] spansim_core::sampler::SamplerError),
    #[error(transparent)]
    Params(#[from] spansim_core::sampler::ParamError),
    #[error("{0}")]
    Usage(String),
    #[error("spanner record: {0}")]
    SpannerRecord(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Outcome of a completed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Violations,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Passed => 0,
            Outcome::Violations => 2,
        }
    }
}

/// Exit code for a command result: 0 pass, 2 violations, 1 usage or I/O error.
pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(_) => 1,
    }
}
