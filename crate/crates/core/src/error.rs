use thiserror::Error;

/// Errors raised by the interval constructions and their exact checkers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: population={population}, sample={sample}, alpha={alpha} (need 0 < sample <= population, 0 < alpha < 1)")]
    InvalidParams {
        population: usize,
        sample: usize,
        alpha: f64,
    },

    #[error("{what}={value} is outside [0, {max}]")]
    OutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("acceptance interval [{lower}, {upper}] at M={m} has probability {prob} below the required level")]
    LevelViolation {
        m: usize,
        lower: usize,
        upper: usize,
        prob: f64,
    },

    #[error("M={m} needs both an upward and a downward shift; the input is not max optimal")]
    ShiftConflict { m: usize },

    #[error("{which} endpoint sequence decreases at M={m}")]
    NotMonotone { which: &'static str, m: usize },

    #[error("acceptance family must cover M in [0, {expected}], got {got} entries")]
    IncompleteFamily { expected: usize, got: usize },

    #[error("confidence set for x={x} is empty")]
    EmptyConfidenceSet { x: usize },

    #[error("tables were built for different parameters")]
    ParamsMismatch,

    #[error("the central symmetric interval needs an even population, got {0}")]
    OddPopulation(usize),

    #[error("tail split {alpha1} + {alpha2} does not sum to alpha={alpha}")]
    AlphaSplit { alpha1: f64, alpha2: f64, alpha: f64 },

    #[error("exact arithmetic is capped at population {cap}, got {population}")]
    Capacity { population: usize, cap: usize },

    #[error("interval [{a}, {b}] spans the whole sample range; the peak is undefined")]
    FullRangeInterval { a: usize, b: usize },

    #[error("malformed rational {0:?}")]
    BadRational(String),

    #[error("malformed table: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
