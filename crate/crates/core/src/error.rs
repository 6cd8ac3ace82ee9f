use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point lies inside an obstacle (distance {distance:.3e} < radius {radius:.3e})")]
    InsideObstacle { distance: f64, radius: f64 },

    #[error("event budget of {max_events} collisions exhausted at time {time:.6e}")]
    EventBudgetExceeded { max_events: usize, time: f64 },

    #[error("empty window: no grid points in ({lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("kernel rejected: {0}")]
    KernelRejected(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("aliasing: grid size {grid} is not a multiple of oscillation scale {scale}")]
    Aliasing { grid: usize, scale: usize },

    #[error("below threshold: t = {t} must exceed {threshold}")]
    BelowThreshold { t: f64, threshold: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is not `Clone`/`PartialEq`; keep its rendered message.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct IoError(pub String);

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
