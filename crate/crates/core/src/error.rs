use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("table shape does not match scenario: {0}")]
    ShapeMismatch(String),

    #[error("negative or out-of-range entry {value} in block (x={x}, y={y})")]
    NegativeEntry { x: usize, y: usize, value: f64 },

    #[error("block (x={x}, y={y}) sums to {sum}, not 1")]
    NotNormalized { x: usize, y: usize, sum: f64 },

    #[error("signaling marginal in block (x={x}, y={y}): deviation {deviation}")]
    Signaling { x: usize, y: usize, deviation: f64 },

    #[error("operation requires two outcomes per party, scenario has dA={d_a}, dB={d_b}")]
    WrongOutcomeCount { d_a: usize, d_b: usize },

    #[error("correlators reconstruct a negative probability {value} at (x={x}, y={y})")]
    InvalidCorrelators { x: usize, y: usize, value: f64 },

    #[error("unknown named behavior or functional `{0}`")]
    UnknownName(String),

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("eigen-solver did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("simplex pivots became numerically unreliable: {0}")]
    NumericalBreakdown(String),

    #[error("value {0} outside the admissible domain")]
    DomainError(f64),

    #[error("covariance matrix is singular")]
    SingularCovariance,

    #[error("enumeration too large: {0} deterministic strategies")]
    TooLarge(u128),

    #[error("only one no-signaling vertex found on the optimal face")]
    OnlyOneVertexFound,

    #[error("base behavior of the line is not inside the tested set")]
    BaseNotInside,

    #[error("deterministic marginal inconsistent with correlator at (x={x}, y={y})")]
    InconsistentDeterministicMarginal { x: usize, y: usize },

    #[error("scenario {0} is not supported by this operation")]
    ScenarioUnsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
