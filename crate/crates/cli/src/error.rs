use std::process::ExitCode;

use diskharm::gridfile::GridFileError;
use diskharm::heatlab::HeatError;
use diskharm::verify::VerifyError;
use diskharm::{QuadratureError, SourceError, TransformError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Verification(_) => ExitCode::from(1),
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
        }
    }
}

fn from_quadrature(e: QuadratureError) -> CliError {
    match e {
        QuadratureError::NonFinite { .. } => CliError::Numerical(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Quadrature(q) => from_quadrature(q),
            TransformError::NonFinite { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<HeatError> for CliError {
    fn from(e: HeatError) -> Self {
        match e {
            HeatError::InvalidProblem(_) => CliError::Usage(e.to_string()),
            HeatError::Transform(t) => t.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Transform(t) => t.into(),
            VerifyError::Quadrature(q) => from_quadrature(q),
            VerifyError::NonFinite(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SourceError> for CliError {
    fn from(e: SourceError) -> Self {
        match e {
            SourceError::NonFinite { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<GridFileError> for CliError {
    fn from(e: GridFileError) -> Self {
        CliError::Usage(e.to_string())
    }
}
