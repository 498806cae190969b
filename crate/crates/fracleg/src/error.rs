use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integer gap b - a = {0}: envelope is degenerate, use the exact Pochhammer ratio")]
    IntegerGap(f64),

    #[error("parameter pole: c = {c} hits a nonpositive integer within {terms} terms")]
    ParameterPole { c: f64, terms: u32 },

    #[error("quadrature did not reach tolerance {requested:e} (achieved {achieved:e})")]
    Quadrature { requested: f64, achieved: f64 },

    #[error("insufficient regularity metadata: {0}")]
    InsufficientRegularity(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("formula not applicable below threshold: n = {n} < {threshold}")]
    BelowThreshold { n: usize, threshold: f64 },

    #[error("bound not stated for these parameters: {0}")]
    BoundNotStated(String),

    #[error("series did not converge: {0}")]
    NonConvergent(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
