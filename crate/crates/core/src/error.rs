use thiserror::Error;

/// Errors produced by the simulation engine.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integration failed at t = {t_last}: {reason}")]
    IntegrationFailed { t_last: f64, reason: String },

    #[error("magnetization direction undefined: |<J>| = {magnitude:.3e} below tolerance")]
    UndefinedDirection { magnitude: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("steady state is degenerate: null space has dimension {multiplicity}")]
    DegenerateSteadyState { multiplicity: usize },

    #[error("N = {n} exceeds the dense-solver cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("brute-force oracle refused: N = {n} exceeds 4")]
    OracleSizeExceeded { n: usize },

    #[error("spectrum invariant violated: {0}")]
    SpectrumInvariant(String),

    #[error("linear algebra backend failed: {0}")]
    Linalg(String),
}
