//! Errors shared by the solvers.

use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{what}: {count} exceeds the cap of {cap}")]
    CapExceeded { what: String, count: u128, cap: u64 },
    #[error("no decision rule given for {0}")]
    MissingRule(String),
    #[error("decision rule for {unit} is malformed: {reason}")]
    MalformedRule { unit: String, reason: String },
    #[error("evidence has probability zero")]
    ZeroProbabilityEvidence,
    #[error("agent {0} is absent-minded")]
    AbsentMinded(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed distribution: {0}")]
    MalformedDistribution(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("variable sets overlap at {0}")]
    Overlap(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn cap_check(what: &str, count: u128, cap: u64) -> Result<()> {
    if count > cap as u128 {
        Err(Error::CapExceeded { what: what.into(), count, cap })
    } else {
        Ok(())
    }
}
