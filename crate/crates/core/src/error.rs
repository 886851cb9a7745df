use thiserror::Error;

/// Errors raised by the factorizations, detectors and simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The Schur complement at `column` (0-based) failed the positive-definiteness guard.
    #[error("leading {0}x{0} block is not positive definite (pivot {pivot:e})", .column + 1)]
    NotPositiveDefinite { column: usize, pivot: f64 },

    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("regularization alpha must be positive, got {0}")]
    DegenerateAlpha(f64),

    #[error("dense inversion failed: singular matrix")]
    SingularMatrix,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("detectors disagree on trial {trial} at {snr_db} dB")]
    DetectorDisagreement { trial: u64, snr_db: f64 },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Strips any context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures caused by the numbers rather than by the caller's configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::NotPositiveDefinite { .. }
                | Error::SingularMatrix
                | Error::DetectorDisagreement { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
