use thiserror::Error;

use crate::bisep::FalsificationSummary;
use crate::fock::Mode;
use crate::opdsl::ParseError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operands live on different Fock spaces ({left} vs {right})")]
    SpaceMismatch { left: String, right: String },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(
        "cutoff too small for mode {mode}: top-level leakage {leakage:e} exceeds {threshold:e}"
    )]
    CutoffTooSmall {
        mode: Mode,
        leakage: f64,
        threshold: f64,
    },

    #[error("cannot fit power law: {0}")]
    CannotFit(String),

    #[error("witness fired on biseparable input ({} violations)", .0.violations.len())]
    Falsified(Box<FalsificationSummary>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
