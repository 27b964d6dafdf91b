use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("snapshot format error at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("config error (line {line}): {reason}")]
    Config { line: usize, reason: String },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("numerical failure after {iterations} iterations: {reason} (residual {residual:e})")]
    Numerical {
        reason: String,
        iterations: usize,
        residual: f64,
    },

    #[error("stability limit violated: {reason} (value {value:e}, limit {limit:e})")]
    Stability {
        reason: String,
        value: f64,
        limit: f64,
    },

    #[error("step {step} (t = {time}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Error classes used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn numerical(reason: impl Into<String>, iterations: usize, residual: f64) -> Self {
        Error::Numerical {
            reason: reason.into(),
            iterations,
            residual,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Argument(_) | Error::Config { .. } => ErrorClass::Usage,
            Error::Dimension(_) | Error::Data(_) | Error::Format { .. } | Error::Io(_) => {
                ErrorClass::Data
            }
            Error::DegenerateSpectrum(_)
            | Error::DegenerateFit(_)
            | Error::Numerical { .. }
            | Error::Stability { .. } => ErrorClass::Numerical,
            Error::Step { source, .. } => source.class(),
        }
    }
}
