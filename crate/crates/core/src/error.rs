// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which side of a split a block-length violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Left,
    Right,
}

impl std::fmt::Display for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Block::Left => f.write_str("left"),
            Block::Right => f.write_str("right"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("{block} block [{start}, {end}] has length {len}; at least 2 observations are required")]
    ShortBlock {
        block: Block,
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("not enough observations: {what} requires n >= {required}, got n = {actual}")]
    TooFewObservations {
        what: &'static str,
        required: usize,
        actual: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("csv line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("csv line {line}, column {col}: cannot parse {value:?} as a number")]
    NonNumeric {
        line: usize,
        col: usize,
        value: String,
    },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the command-line front end.
    ///
    /// 2 = usage error, 3 = data error, 4 = numeric degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 2,
            Error::Degenerate(_) => 4,
            _ => 3,
        }
    }
}
