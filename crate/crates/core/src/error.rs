use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("unsupported metric: {0}")]
    UnsupportedMetric(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("total masses differ: {0} vs {1}")]
    MassMismatch(f64, f64),

    #[error("monotonicity violation: {0}")]
    MonotonicityViolation(String),

    #[error("not a subcomplex")]
    NotASubcomplex,

    #[error("grid needs at least two values on each axis")]
    EmptyGrid,

    #[error("line is not monotone in J: k must not increase and r must not decrease")]
    NonMonotoneLine,

    #[error("barcodes have {0} and {1} infinite bars")]
    InfiniteMismatch(usize, usize),

    #[error("parameter out of window: {0}")]
    ParameterOutOfWindow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::UnsupportedMetric(_) => "UnsupportedMetric",
            Error::InvalidInput(_) => "InvalidInput",
            Error::GuardExceeded(_) => "GuardExceeded",
            Error::SizeGuard(_) => "SizeGuard",
            Error::MassMismatch(..) => "MassMismatch",
            Error::MonotonicityViolation(_) => "MonotonicityViolation",
            Error::NotASubcomplex => "NotASubcomplex",
            Error::EmptyGrid => "EmptyGrid",
            Error::NonMonotoneLine => "NonMonotoneLine",
            Error::InfiniteMismatch(..) => "InfiniteMismatch",
            Error::ParameterOutOfWindow(_) => "ParameterOutOfWindow",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
