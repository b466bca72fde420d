use thiserror::Error;

/// Errors surfaced by the regression, feature-map and training layers.
#[derive(Debug, Error)]
pub enum CoreError {
    /// An input contained NaN or infinity where finite values are required.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// Dimensions of two operands do not line up.
    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    Shape {
        context: &'static str,
        expected: String,
        found: String,
    },

    /// Cholesky factorization hit a non-positive pivot.
    #[error("cholesky factorization failed at pivot {pivot} (value {value:.3e})")]
    Factorization { pivot: usize, value: f64 },

    /// Factorization kept failing after the full jitter escalation.
    #[error("factorization failed with jitter up to {max_jitter:.1e}")]
    JitterExhausted { max_jitter: f64 },

    /// Malformed configuration or serialized payload.
    #[error("{0}")]
    Invalid(String),
}

impl CoreError {
    pub fn shape(context: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        CoreError::Shape {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
