use thiserror::Error;

/// Errors raised by the symplectic-control library.
#[derive(Debug, Error)]
pub enum Sp2Error {
    #[error("matrix is not traceless: |trace| = {trace}")]
    NonTraceless { trace: f64 },

    #[error("matrix is not symplectic: det = {det}, expected 1")]
    NotSymplectic { det: f64 },

    #[error("algebra element is not hyperbolic (Tr[M^2] = {trace_sq})")]
    NotHyperbolic { trace_sq: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("system is not unstable: some accessible generator is non-hyperbolic")]
    NotUnstable,

    #[error("system fails the Lie algebra rank criterion")]
    RankCriterion,

    #[error("bisection bracket endpoints have the same reach status")]
    NoBracket,

    #[error("no records to render")]
    EmptyInput,

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Sp2Error>;
