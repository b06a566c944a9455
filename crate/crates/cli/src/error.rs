//! Process-level error handling and exit-code policy.
//!
//! Every failure surfaces as an [`AppError`] carrying a human-readable
//! message.  Validation problems — bad flags, inconsistent configuration,
//! malformed input rows, physics errors such as mode softening — exit with
//! code 2.  Filesystem and OS failures exit with code 3.  Success is 0.

use std::fmt;
use std::path::Path;

/// Top-level error for the `polariton` binary.
#[derive(Debug)]
pub enum AppError {
    /// Bad usage, invalid configuration, or malformed input content.
    Validation(String),
    /// An operating-system I/O failure (missing file, permissions, ...).
    Io(String),
}

impl AppError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Io(_) => 3,
        }
    }

    /// Convenience constructor for validation failures.
    pub fn invalid(message: impl Into<String>) -> Self {
        AppError::Validation(message.into())
    }

    /// Wrap an OS-level error with the path that triggered it.
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        AppError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Validation(msg) => write!(f, "error: {msg}"),
            AppError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<polariton_core::ModelError> for AppError {
    fn from(err: polariton_core::ModelError) -> Self {
        AppError::Validation(err.to_string())
    }
}

impl From<polariton_fieldmap::FieldMapError> for AppError {
    fn from(err: polariton_fieldmap::FieldMapError) -> Self {
        match err {
            polariton_fieldmap::FieldMapError::Io { .. } => AppError::Io(err.to_string()),
            other => AppError::Validation(other.to_string()),
        }
    }
}

impl From<polariton_spectroscopy::MapError> for AppError {
    fn from(err: polariton_spectroscopy::MapError) -> Self {
        match err {
            polariton_spectroscopy::MapError::Io { .. } => AppError::Io(err.to_string()),
            other => AppError::Validation(other.to_string()),
        }
    }
}

impl From<polariton_spectroscopy::RidgeError> for AppError {
    fn from(err: polariton_spectroscopy::RidgeError) -> Self {
        match err {
            polariton_spectroscopy::RidgeError::Io { .. } => AppError::Io(err.to_string()),
            other => AppError::Validation(other.to_string()),
        }
    }
}

impl From<polariton_spectroscopy::FitError> for AppError {
    fn from(err: polariton_spectroscopy::FitError) -> Self {
        AppError::Validation(err.to_string())
    }
}

impl From<polariton_metrology::MetrologyError> for AppError {
    fn from(err: polariton_metrology::MetrologyError) -> Self {
        AppError::Validation(err.to_string())
    }
}
