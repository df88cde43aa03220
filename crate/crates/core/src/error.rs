use std::io;

use thiserror::Error;

/// Errors surfaced by construction, decoding and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (bad index, identical rows, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input data is malformed or inconsistent with the code.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An internal consistency check failed. This always indicates a bug in
    /// construction or decoding, never a channel event.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($arg)+)));
        }
    };
}

pub(crate) use ensure;
