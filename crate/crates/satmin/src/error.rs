use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ostdigits::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed {what}, line {line}: {msg}")]
    Format { what: &'static str, line: usize, msg: String },
    #[error("solver failure: {msg}{}", instance.as_ref().map(|p| format!(" (instance kept at {})", p.display())).unwrap_or_default())]
    Solver { msg: String, instance: Option<PathBuf> },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
