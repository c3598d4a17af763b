//! Error type shared by every operation in the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("shape mismatch in {op}: expected {expected}, got {got}")]
    ShapeMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("non-finite value produced by {op} (epoch {epoch}, batch {batch})")]
    NonFinite {
        op: &'static str,
        /// Training epoch when raised inside the training loop; 0 elsewhere.
        epoch: usize,
        /// Mini-batch index when raised inside the training loop; 0 elsewhere.
        batch: usize,
    },

    #[error("invalid configuration: {0}")]
    BadConfig(String),

    #[error("empty dataset (need at least one window)")]
    EmptyDataset,

    #[error("snapshot rejected: {0}")]
    BadSnapshot(String),
}

impl NnError {
    /// Non-finite error outside the training loop.
    pub fn non_finite(op: &'static str) -> Self {
        NnError::NonFinite {
            op,
            epoch: 0,
            batch: 0,
        }
    }
}

/// Returns `Err` if any element of the slice is NaN or infinite.
pub fn ensure_finite(op: &'static str, values: &[f64]) -> Result<(), NnError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(NnError::non_finite(op))
    }
}
