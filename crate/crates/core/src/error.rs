use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad outcome classes; the CLI maps each to an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Malformed or out-of-range input supplied by the caller.
    Input,
    /// A well-formed input the operation is not defined for.
    Inapplicable,
    /// A search ended before covering its whole tree.
    Truncated,
    /// A proven structural property failed on concrete data.
    InternalConsistency,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("position {position}: cannot parse {token:?} as a label")]
    Parse { position: usize, token: String },

    #[error("position {position}: label {label} outside 1..={d}")]
    LabelOutOfRange {
        position: usize,
        label: i64,
        d: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid search options: {0}")]
    InvalidOptions(String),

    #[error("sequence is not closed: some label occurs an odd number of times")]
    NotClosed,

    #[error("sequence of length {len} is too short to be a cycle (minimum 4)")]
    TooShort { len: usize },

    #[error("not a valid circuit code: {0}")]
    NotACode(String),

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("internal-consistency failure: {0}")]
    InternalConsistency(String),

    #[error("enumeration incomplete: search stopped after {nodes} nodes")]
    IncompleteEnumeration { nodes: u64 },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parse { .. }
            | Error::LabelOutOfRange { .. }
            | Error::InvalidParams(_)
            | Error::InvalidOptions(_)
            | Error::NotClosed
            | Error::TooShort { .. }
            | Error::NotACode(_) => ErrorCategory::Input,
            Error::Inapplicable(_) => ErrorCategory::Inapplicable,
            Error::IncompleteEnumeration { .. } => ErrorCategory::Truncated,
            Error::InternalConsistency(_) => ErrorCategory::InternalConsistency,
        }
    }
}
