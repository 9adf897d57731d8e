use thiserror::Error;

/// Errors surfaced by construction and by engine operations. Rate formulas
/// never error on out-of-range hypotheses; they return flagged results.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid function class: {0}")]
    InvalidClass(String),

    #[error("invalid algorithm parameters: {0}")]
    InvalidParams(String),

    #[error("invalid circle: {0}")]
    InvalidCircle(String),

    #[error("gradient SRG requires finite smoothness")]
    InfiniteSmoothness,

    #[error("linear map requires homogeneous instance")]
    NonHomogeneousInstance,

    #[error("invalid quadratic: {0}")]
    InvalidQuadratic(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
