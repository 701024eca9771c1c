use thiserror::Error;

use crate::series::MonthStamp;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series of length {len} is shorter than required {required}")]
    Length { len: usize, required: usize },

    #[error("non-positive value {value} at {month}")]
    NonPositive { month: MonthStamp, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series do not overlap: {a_start}..{a_end} vs {b_start}..{b_end}")]
    Alignment {
        a_start: MonthStamp,
        a_end: MonthStamp,
        b_start: MonthStamp,
        b_end: MonthStamp,
    },

    #[error("no trading days in {0}")]
    Gap(MonthStamp),

    #[error("{month} has {days} trading day(s); at least 2 are needed for a dispersion measure")]
    DegenerateMonth { month: MonthStamp, days: usize },

    #[error("age {age} outside the admissible range {min}..={max}")]
    AgeRange { age: usize, min: usize, max: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("eigen-solve failed: {0}")]
    Eigen(String),

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, printed by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Length { .. } => "E_LENGTH",
            Error::NonPositive { .. } | Error::Domain(_) => "E_DOMAIN",
            Error::Alignment { .. } => "E_ALIGN",
            Error::Gap(_) => "E_GAP",
            Error::DegenerateMonth { .. } => "E_DEGENERATE",
            Error::AgeRange { .. } => "E_AGE_RANGE",
            Error::Singular(_) => "E_SINGULAR",
            Error::Eigen(_) => "E_EIGEN",
            Error::Spec(_) => "E_SPEC",
            Error::Parse { .. } => "E_PARSE",
            Error::Validation(_) => "E_VALIDATION",
            Error::Config(_) => "E_CONFIG",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_JSON",
        }
    }
}
