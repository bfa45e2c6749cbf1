use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The document could not be parsed. `path` points at the offending key when known.
    #[error("parse error{}: {message}", path.as_deref().map(|p| format!(" at `{p}`")).unwrap_or_default())]
    Parse { path: Option<String>, message: String },

    /// A value violates a domain invariant.
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("unknown role `{0}`")]
    UnknownRole(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    /// A sweep or override path that does not name a numeric scenario field.
    #[error("invalid parameter path `{path}`: {reason}")]
    InvalidPath { path: String, reason: String },

    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),

    #[error("cannot read `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), reason: reason.into() }
    }

    /// Dotted path of the field at fault, for validation-style failures.
    pub fn field_path(&self) -> Option<&str> {
        match self {
            Error::Validation { field, .. } => Some(field),
            Error::InvalidPath { path, .. } => Some(path),
            Error::Parse { path, .. } => path.as_deref(),
            _ => None,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } => ErrorKind::BadRequest,
            Error::UnknownScenario(_) => ErrorKind::NotFound,
            Error::Validation { .. } | Error::InvalidPath { .. } | Error::UnknownRole(_) | Error::Overflow(_) => {
                ErrorKind::Unprocessable
            }
            Error::Io { .. } => ErrorKind::Internal,
        }
    }

    /// Serializable summary, used for per-point sweep failures.
    pub fn to_record(&self) -> ErrorRecord {
        ErrorRecord { code: self.kind(), message: self.to_string(), field_path: self.field_path().map(str::to_string) }
    }
}

/// Coarse error category shared by the CLI exit codes and the HTTP status mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    BadRequest,
    NotFound,
    Unprocessable,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub code: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_path: Option<String>,
}
