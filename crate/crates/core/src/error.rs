use thiserror::Error;

/// Errors produced by the model, estimation and data layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("stationarity violated: |phi| = {0} must be < 1")]
    StationarityViolation(f64),
    #[error("sigma must be > 0, got {0}")]
    NonPositiveSigma(f64),
    #[error("rho must lie in (-1, 1), got {0}")]
    CorrelationOutOfRange(f64),
    #[error("{kind} model does not allow {detail}")]
    KindConstraintViolation { kind: &'static str, detail: String },
    #[error("non-finite parameter {0}")]
    NonFiniteParameter(&'static str),
    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("series too short: {got} observations, need at least {need}")]
    TooShort { got: usize, need: usize },
    #[error("series is degenerate (zero variance)")]
    DegenerateSeries,
    #[error("non-finite value in {0}")]
    NonFiniteLikelihood(&'static str),
    #[error("prior support violation: {0}")]
    PriorSupportViolation(String),
    #[error("invalid chain configuration: {0}")]
    InvalidChainConfig(String),
    #[error("invalid simulation configuration: {0}")]
    InvalidSimConfig(String),
    #[error("posterior chain is empty")]
    EmptyChain,
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    #[error("non-positive price {price} at row {row}")]
    NonPositivePrice { row: usize, price: f64 },
    #[error("dates not strictly increasing at row {row}")]
    NonMonotoneDates { row: usize },
    #[error("input contains no usable rows")]
    EmptyInput,
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
        Error::Parse {
            row,
            column: String::new(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
