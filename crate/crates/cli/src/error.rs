use std::path::{Path, PathBuf};

use statecert::CertError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{path}: {inner}")]
    InFile { path: PathBuf, inner: Box<CliError> },
    #[error("not a Wigner grid file (bad magic)")]
    BadMagic,
    #[error("unsupported Wigner grid format version {0:?} (expected \"WGF1\")")]
    UnsupportedVersion(String),
    #[error("truncated file: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Self::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn in_file(self, path: &Path) -> Self {
        Self::InFile {
            path: path.to_path_buf(),
            inner: Box::new(self),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
