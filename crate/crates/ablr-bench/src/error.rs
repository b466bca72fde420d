//! Benchmark-level error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Bo(#[from] ablr_bo::BoError),
    #[error(transparent)]
    Core(#[from] ablr_core::CoreError),
    #[error("invalid benchmark configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("table schema violation at line {line}: {message}")]
    Schema { line: usize, message: String },
}

impl BenchError {
    pub fn io(path: impl std::fmt::Display, source: std::io::Error) -> Self {
        BenchError::Io { path: path.to_string(), source }
    }
}
