use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: duplicate date {date}")]
    DuplicateDate { line: u64, date: String },
    #[error("input `{0}` contains no records")]
    EmptyInput(String),
    #[error("need at least {needed} series, got {got}")]
    TooFewSeries { needed: usize, got: usize },
    #[error("the series share no common dates")]
    EmptyIntersection,
    #[error("series is too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("autocorrelation never falls below 1/e within {max_lag} lags")]
    NoDecorrelation { max_lag: usize },
    #[error("point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("only {available} lags remain beyond tau_c = {tau_c}, need at least {needed}")]
    TooFewLags {
        tau_c: usize,
        available: usize,
        needed: usize,
    },
    #[error("surrogate distribution has zero spread")]
    DegenerateSurrogates,
    #[error("trends do not share one window grid")]
    InconsistentGrid,
    #[error("peak at index {peak} of `{label}` leaves insufficient history for offset {offset}")]
    InsufficientHistory {
        label: String,
        peak: usize,
        offset: i64,
    },
    #[error("search interval contains no dates of `{0}`")]
    EmptySearchInterval(String),
    #[error("trajectory diverged at step {0}")]
    Diverged(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
