use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoError {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid history: {0}")]
    InvalidHistory(String),
    #[error("invalid configuration value: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Core(#[from] ablr_core::CoreError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("black-box evaluation failed after {attempts} attempts")]
    EvaluationExhausted { attempts: usize },
}
