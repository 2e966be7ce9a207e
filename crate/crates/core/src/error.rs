use thiserror::Error;

/// Errors raised by constructions, generators and instance I/O.
#[derive(Debug, Error)]
pub enum SpannerError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate or distance: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("metric violation: {0}")]
    MetricViolation(String),

    #[error("ultrametric violation at ({0}, {1}, {2}): {3}")]
    UltrametricViolation(usize, usize, usize, String),

    #[error("spanner is disconnected; lightness is undefined")]
    Disconnected,

    #[error("graph is disconnected")]
    DisconnectedGraph,

    #[error("sampling budget exhausted after {attempts} attempts ({accepted} of {target} points accepted); {hint}")]
    BudgetExhausted {
        attempts: u64,
        accepted: usize,
        target: usize,
        hint: String,
    },

    #[error("stretch bound violated: {measured} > {bound} at pair ({u}, {v})")]
    StretchViolation {
        measured: f64,
        bound: f64,
        u: usize,
        v: usize,
    },

    #[error("instance format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = SpannerError> = std::result::Result<T, E>;
