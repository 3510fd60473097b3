use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("group element {element} does not belong to {model}")]
    ModelMismatch { element: String, model: String },

    #[error("invalid generating set: {0}")]
    InvalidGenerators(String),

    #[error("ball of radius {radius} exceeds the element cap of {cap}")]
    BallCap { radius: u32, cap: usize },

    #[error("element {0} is not reachable from the identity")]
    Unreachable(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid length function: {0}")]
    InvalidLength(String),

    #[error("length function has no tabulated value at {0}")]
    OutsideTable(String),

    #[error("invalid spectral triple: {0}")]
    InvalidTriple(String),

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("invalid operator system: {0}")]
    InvalidOperatorSystem(String),

    #[error("distance matrix is not a metric: {0}")]
    NotMetric(String),

    #[error("parity mismatch: {0}")]
    ParityMismatch(String),

    #[error("invalid functional: {0}")]
    InvalidFunctional(String),

    #[error("radius schedule must be non-empty and strictly increasing")]
    InvalidSchedule,

    #[error("length value at {0} is singular")]
    SingularLength(String),

    #[error("seminorm vanishes on a direction separating the two states")]
    DegenerateSeminorm,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
