use thiserror::Error;

/// Errors shared by all solver and imaging components.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("schedule rejected: {0}")]
    InvalidSchedule(String),

    #[error("objective domain violation: {0}")]
    Domain(String),

    #[error("divergence at iteration {k}: subgradient norm {u_norm:.3e} exceeds cap {cap:.3e}")]
    Divergence { k: usize, u_norm: f64, cap: f64 },

    #[error("partial product overflowed f64 range at index {k}")]
    Overflow { k: usize },

    #[error("infeasible dual variable: duality gap {gap:.3e} below tolerance")]
    InfeasibleDual { gap: f64 },

    #[error("reference run did not stabilize: last-decade relative f-change {change:.3e} exceeds {tol:.3e}")]
    ReferenceNotConverged { change: f64, tol: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file {path}: {reason}")]
    Format { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
