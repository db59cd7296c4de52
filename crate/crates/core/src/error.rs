use thiserror::Error;

use crate::norm::NormEstimate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    InvalidGenerator { index: usize, rank: usize },

    #[error("word or element does not belong to group {expected}")]
    GroupMismatch { expected: String },

    #[error("scalar mode mismatch: {left} vs {right}")]
    ModeMismatch { left: &'static str, right: &'static str },

    #[error("{what}: size {size} exceeds budget {cap}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
        /// Whatever was certified before the budget ran out.
        partial: Option<Box<NormEstimate>>,
    },

    #[error("operation `{op}` requires a free group backend, got {group}")]
    WrongBackend { op: &'static str, group: String },

    #[error("target must not be the identity")]
    IdentityTarget,

    #[error("geometric seed must not be the identity")]
    IdentityGenerator,

    #[error("invalid weights: {0}")]
    WeightError(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }

    pub(crate) fn budget(what: &'static str, size: usize, cap: usize) -> Self {
        Error::BudgetExceeded { what, size, cap, partial: None }
    }
}
