use thiserror::Error;

/// Errors produced by the kernel and the higher layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Layout(String),

    #[error("dimension {0} exceeds the configured maximum {1}")]
    DimensionLimit(usize, usize),

    #[error("vector is not normalized: ‖v‖ = {0}")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("invalid Gram specification: {0}")]
    InvalidGram(String),

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("conditioning on a null event (probability ≈ 0)")]
    NullEvent,

    #[error("degenerate correlated form: every amplitude component vanishes")]
    DegenerateForm,

    #[error("descriptors do not span the support of the state (residual {0:.3e})")]
    Span(f64),

    #[error("environment purifications have mismatched marginals (max deviation {0:.3e})")]
    MismatchedMarginals(f64),

    #[error("impossible outcome: all candidate likelihoods vanish")]
    ImpossibleOutcome,
}

pub type Result<T> = std::result::Result<T, Error>;
