use std::io;

use thiserror::Error;

/// Errors surfaced by every operation in the crate.
///
/// The variants map one-to-one onto the CLI exit codes: usage problems exit
/// with 2, budget overruns with 3 and oracle mismatches with 4.
#[derive(Debug, Error)]
pub enum ArfError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("resource error: {what} needs {requested} entries but the budget is {budget}")]
    Resource {
        what: String,
        requested: u64,
        budget: u64,
    },

    #[error("coverage error: need values on [{need_lo}, {need_hi}] but the table covers [{have_lo}, {have_hi}]")]
    Coverage {
        need_lo: u64,
        need_hi: u64,
        have_lo: u64,
        have_hi: u64,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("corrupt table file: {0}")]
    Corruption(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl ArfError {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        ArfError::Usage(msg.into())
    }
}

pub type Result<T, E = ArfError> = std::result::Result<T, E>;
