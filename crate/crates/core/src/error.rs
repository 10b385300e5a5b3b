use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown model id `{0}` (expected one of c1d, xy2, xyz, hh)")]
    UnknownModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("model mismatch: law is for {law}, series is for {series}")]
    ModelMismatch { law: String, series: String },

    #[error("matrix dimension {dim} exceeds the configured cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("ODE integration failed: {0}")]
    Ode(String),

    #[error("special function evaluation outside accuracy envelope: {0}")]
    SpecialFunction(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("non-alternating tail: {0}")]
    NonAlternating(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
