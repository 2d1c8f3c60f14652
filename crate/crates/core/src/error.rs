// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the laboratory. The variants are grouped by the CLI exit
/// code they map onto.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed user input (bad flag value, unknown config key, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation precondition does not hold for otherwise valid input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An internal certificate (mass formula, discriminant, eigenspace, ...)
    /// failed to verify.
    #[error("certification failed: {0}")]
    Certification(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 1,
            Error::Precondition(_) => 2,
            Error::Certification(_) => 3,
            Error::Io(_) | Error::Json(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! precondition {
    ($($arg:tt)*) => {
        $crate::error::Error::Precondition(format!($($arg)*))
    };
}

macro_rules! certification {
    ($($arg:tt)*) => {
        $crate::error::Error::Certification(format!($($arg)*))
    };
}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(format!($($arg)*))
    };
}

pub(crate) use certification;
pub(crate) use invalid;
pub(crate) use precondition;
