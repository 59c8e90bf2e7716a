use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("missing capability: {0}")]
    Capability(&'static str),

    #[error("insufficient samples: {required} required, {available} available")]
    InsufficientSamples { required: usize, available: usize },

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("promise violated: {0}")]
    PromiseViolation(String),

    #[error("intervals overlap: J = [{j_lo}, {j_hi}], K = [{k_lo}, {k_hi}]")]
    Overlap {
        j_lo: usize,
        j_hi: usize,
        k_lo: usize,
        k_hi: usize,
    },

    #[error("refusing domain of size {n}; limit is {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
