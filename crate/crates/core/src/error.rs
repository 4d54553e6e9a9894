use std::fmt;

use thiserror::Error;

/// Position of a syntax problem in a text input, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {at}: {msg}")]
    Syntax { at: Location, msg: String },

    #[error("line {line}: qubit {qubit} appears twice in one gate")]
    DuplicateQubit { line: usize, qubit: usize },

    #[error("line {line}: gates overlap on qubit {qubit} within one slice")]
    SliceOverlap { line: usize, qubit: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("missing mandatory key `{0}`")]
    MissingKey(String),

    #[error("invalid arity distribution: {0}")]
    ArityDistribution(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid mapping: {0}")]
    Mapping(String),

    #[error("no gate delay for `{name}` and no `{fallback}` entry")]
    UnknownGate { name: String, fallback: String },

    #[error("bundle holds {len} instructions, limit is {max}")]
    BundleTooLong { len: usize, max: usize },

    #[error("sweep: {0}")]
    Sweep(String),
}

impl Error {
    /// Broad category used by front ends to pick exit codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Syntax { .. }
            | Error::DuplicateQubit { .. }
            | Error::SliceOverlap { .. }
            | Error::Config(_)
            | Error::UnknownKey(_)
            | Error::MissingKey(_)
            | Error::ArityDistribution(_)
            | Error::Mapping(_) => ErrorCategory::Input,
            Error::Capacity(_) => ErrorCategory::Capacity,
            Error::UnknownGate { .. } | Error::BundleTooLong { .. } => ErrorCategory::Model,
            Error::Sweep(_) => ErrorCategory::Sweep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Capacity,
    Model,
    Sweep,
}

pub type Result<T> = std::result::Result<T, Error>;
