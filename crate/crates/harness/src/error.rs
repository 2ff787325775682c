use std::path::PathBuf;

use thiserror::Error;
use tracerec_core::Error as CoreError;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("audit failed: {0}")]
    Audit(String),

    #[error(transparent)]
    Core(CoreError),
}

impl From<CoreError> for HarnessError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Infeasible(msg) => HarnessError::Infeasible(msg),
            CoreError::OracleCap { .. } | CoreError::TraceCountCap { .. } | CoreError::TooManyRuns { .. } => {
                HarnessError::Infeasible(e.to_string())
            }
            other => HarnessError::Core(other),
        }
    }
}

impl HarnessError {
    /// Process exit status: 2 config, 3 infeasible, 4 audit failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Infeasible(_) => 3,
            HarnessError::Audit(_) => 4,
            _ => 2,
        }
    }
}
