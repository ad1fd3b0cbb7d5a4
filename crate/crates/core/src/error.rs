use thiserror::Error;

/// Errors produced by the numerical and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficients cannot be normalized: they sum to zero")]
    NotNormalizable,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("optimizer did not converge after {iterations} iterations (best value {best})")]
    NonConvergence { iterations: usize, best: f64 },

    #[error("constraint region is empty")]
    EmptyRegion,

    #[error("quadrature tolerance not met: estimate {estimate}, error {error}")]
    QuadratureTolNotMet { estimate: f64, error: f64 },

    #[error("innovation model has no heavy (balanced regularly varying) profile")]
    MissingHeavyProfile,

    #[error("undecidable: {0}")]
    Undecidable(String),

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("divergent log-mgf term at offset {offset} (window {window})")]
    DivergentTerm { offset: i64, window: usize },

    #[error("unsupported dimension {0}: only d = 1 is supported here")]
    UnsupportedDimension(usize),

    #[error("feasible set is empty: {0}")]
    EmptyFeasibleSet(String),

    #[error("root not bracketed: {0}")]
    RootNotBracketed(String),

    #[error("the tilt set G is empty (Condition A fails or search exhausted)")]
    EmptyG,

    #[error("omega = {0} is excluded (omega = beta(1 - alpha) + 1)")]
    ForbiddenOmega(f64),

    #[error("no t in C with g(t) < 0 could be verified")]
    NoNegativeG,

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported coefficient family: {0}")]
    UnsupportedFamily(String),

    #[error("unsupported target set: {0}")]
    UnsupportedSet(String),

    #[error("no qualifying segment within budget of {cap} observations")]
    NotFoundWithinBudget { cap: usize },

    #[error("no drift certificate: the horizon tail cannot be bounded")]
    NoDriftCertificate,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
