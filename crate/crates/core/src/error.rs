use thiserror::Error;

use crate::recurrence::RuleLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rule {label} is singular at n = {index}: {reason}")]
    RuleEvaluation {
        label: RuleLabel,
        index: usize,
        reason: String,
    },

    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: String, found: usize },

    #[error("seed error: {0}")]
    Seed(String),

    #[error("invalid recurrence: {0}")]
    InvalidSpec(String),

    #[error("{what} = {requested} exceeds the configured cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("sub-series table for N = {order} does not reach power {power}")]
    IncompleteCoverage { order: usize, power: usize },

    #[error("termination fails at i = {i}: B_{index} = {value} is not zero")]
    TerminationViolation {
        i: usize,
        index: usize,
        value: String,
    },

    #[error("termination profile is not monotone at i = {i}")]
    ProfileOrder { i: usize },

    #[error("termination profile has {len} entries, sub-series N = {order} needs {needed}")]
    ProfileTooShort {
        len: usize,
        order: usize,
        needed: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::RuleEvaluation { .. } => "RuleEvaluationError",
            Error::Arity { .. } => "ArityError",
            Error::Seed(_) => "SeedError",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::IncompleteCoverage { .. } => "IncompleteCoverage",
            Error::TerminationViolation { .. } => "TerminationViolation",
            Error::ProfileOrder { .. } => "ProfileOrderError",
            Error::ProfileTooShort { .. } => "ProfileOrderError",
            Error::Domain(_) => "DomainError",
            Error::NonFinite { .. } => "NonFinite",
            Error::Parse(_) => "ParseError",
        }
    }

    /// The recurrence index the error refers to, when there is one.
    pub fn index(&self) -> Option<usize> {
        match self {
            Error::RuleEvaluation { index, .. }
            | Error::TerminationViolation { index, .. }
            | Error::NonFinite { index } => Some(*index),
            Error::IncompleteCoverage { power, .. } => Some(*power),
            Error::ProfileOrder { i } => Some(*i),
            _ => None,
        }
    }
}
