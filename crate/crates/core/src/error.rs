use std::io;

use thiserror::Error;

use crate::solver::SimState;

pub type Result<T> = std::result::Result<T, HmhdError>;

#[derive(Debug, Error)]
pub enum HmhdError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("blow-up at t = {time}: {reason}")]
    BlowUp {
        time: f64,
        reason: String,
        last_good: Box<SimState>,
    },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl From<csv::Error> for HmhdError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => HmhdError::Io(io),
                other => HmhdError::Format(format!("{other:?}")),
            }
        } else {
            HmhdError::Format(e.to_string())
        }
    }
}

impl From<serde_json::Error> for HmhdError {
    fn from(e: serde_json::Error) -> Self {
        HmhdError::Format(e.to_string())
    }
}
