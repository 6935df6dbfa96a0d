use thiserror::Error;

/// Errors raised by the laboratory. Every variant is a domain error except
/// `HorizonExhausted`, which callers map to a distinct exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MmmError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational `{0}`")]
    Parse(String),
    #[error("empty initial set")]
    EmptySet,
    #[error("median of an empty multiset")]
    EmptyMultiset,
    #[error("window bounds reversed: lo = {lo} > hi = {hi}")]
    ReversedWindow { lo: String, hi: String },
    #[error("host set has even size {0}; readiness is defined for odd sizes only")]
    EvenHost(usize),
    #[error("window is not ready: {0}")]
    NotReady(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("prediction mismatch at x_{index}: predicted {predicted}, simulated {simulated}")]
    PredictionMismatch {
        index: usize,
        predicted: String,
        simulated: String,
    },
    #[error("sentinels still reached after {0} enlargements")]
    SentinelRetries(usize),
    #[error("horizon {0} exhausted")]
    HorizonExhausted(usize),
    #[error("{0}")]
    Domain(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for MmmError {
    fn from(e: std::io::Error) -> Self {
        MmmError::Io(e.to_string())
    }
}

impl From<csv::Error> for MmmError {
    fn from(e: csv::Error) -> Self {
        MmmError::Io(e.to_string())
    }
}

pub type Result<T, E = MmmError> = std::result::Result<T, E>;
