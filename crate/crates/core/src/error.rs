use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("non-physical state in cell {cell} node {node}: rho={rho}, T={temperature}")]
    NonPhysical {
        cell: usize,
        node: usize,
        rho: f64,
        temperature: f64,
    },

    #[error("non-physical state: rho={rho}, T={temperature}")]
    InvalidState { rho: f64, temperature: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("step {step} (t={time}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<SolverError>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl SolverError {
    /// Short machine-parsable category, used as the CLI exit line prefix.
    pub fn category(&self) -> &'static str {
        match self {
            SolverError::NonPhysical { .. } | SolverError::InvalidState { .. } => "nonphysical",
            SolverError::ShapeMismatch(_) => "shape",
            SolverError::InvalidArgument(_) => "argument",
            SolverError::InvalidConfig(_) => "config",
            SolverError::Step { source, .. } => source.category(),
            SolverError::Io { .. } => "io",
            SolverError::Parse { .. } => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, SolverError>;
