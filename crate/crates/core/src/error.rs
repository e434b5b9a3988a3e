use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("beam index {index} out of range for codebook of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("beam index {0} selected more than once")]
    DuplicateIndex(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("matrix is singular or ill-conditioned (condition number {0:.3e})")]
    Singular(f64),

    #[error("exhaustive search needs {candidates} candidates, budget is {budget}")]
    BudgetExceeded { candidates: String, budget: u64 },

    #[error("all {0} Monte-Carlo drops were degenerate")]
    AllDropsDegenerate(usize),

    #[error("config error in `{field}`: {message}")]
    Config { field: &'static str, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            field,
            message: message.into(),
        }
    }

    /// Errors raised before any computation because the inputs are invalid.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::IndexOutOfRange { .. }
                | Error::DuplicateIndex(_)
                | Error::Parameter(_)
                | Error::BudgetExceeded { .. }
                | Error::Config { .. }
        )
    }
}
