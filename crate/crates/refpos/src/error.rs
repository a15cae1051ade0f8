use thiserror::Error;

/// Errors surfaced by the library. Quadrature non-convergence is *not* an
/// error: it travels inside `QuadResult` as a flag with a partial value.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation at a singular point: {0}")]
    SingularPoint(String),

    #[error("operation unsupported for this input: {0}")]
    Unsupported(String),

    #[error("mass constraint violated: {0}")]
    MassViolation(String),

    #[error("zero-mass input: {0}")]
    ZeroMass(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
