use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of an operation (x ≤ 0, n out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid metric-family parameters.
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("argument error: {0}")]
    Argument(String),

    /// The space has no explicit matrix model (Cayley plane).
    #[error("no matrix model available for {0}")]
    UnsupportedModel(String),

    #[error("model construction failed: {0}")]
    ModelConstruction(String),

    /// The Δ-form is evaluated at the zero section while C₁ > 0.
    #[error("Δ-form does not extend over the zero section: {0}")]
    SingularExtension(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
