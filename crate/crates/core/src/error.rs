use thiserror::Error;

/// Errors produced by the toolkit.
///
/// `is_input_error` distinguishes bad input data (CLI exit code 2) from
/// runtime failures (exit code 1).
#[derive(Error, Debug)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Validation(String),
    #[error("line {line}: unknown category {label:?}")]
    UnknownCategory { line: usize, label: String },
    #[error("duplicate venue_id {id:?}")]
    DuplicateVenue { id: String },
    #[error("network is empty")]
    EmptyNetwork,
    #[error("network has no edges")]
    NoEdges,
    #[error("run on GCC only: network is disconnected")]
    Disconnected,
    #[error("meshness undefined: need at least 3 nodes, got {v}")]
    MeshnessUndefined { v: usize },
    #[error("ensemble needs at least one run")]
    NoRuns,
    #[error("undefined correlation: zero variance")]
    ZeroVariance,
    #[error("correlation needs two equal-length vectors of length >= 2")]
    BadCorrelationInput,
    #[error("no venues were assigned to any network node")]
    NoAssignedVenues,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error stems from malformed or invalid input data.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Validation(_)
                | Error::UnknownCategory { .. }
                | Error::DuplicateVenue { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
