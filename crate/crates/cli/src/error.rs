use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// Bad configuration; `path` locates the offending field.
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Model(#[from] threshold_lab::Error),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl std::fmt::Display) -> Self {
        CliError::Config { path: path.into(), message: message.to_string() }
    }

    /// 2 for numeric guardrail failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_guardrail() => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
