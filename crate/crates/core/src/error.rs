use thiserror::Error;

/// Errors produced by the design toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A conversion denominator vanished (singular or degenerate network).
    #[error("degenerate network: {0}")]
    Degenerate(String),

    /// An argument violated a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The operation expected a different matrix representation.
    #[error("expected {expected} representation, got {found}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },

    /// A design stage could not find a feasible solution.
    #[error("infeasible at stage `{stage}`: {detail}")]
    Infeasible { stage: String, detail: String },

    /// Malformed input text (Touchstone, layer or design files).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Tabulated data failed a consistency check at a given row.
    #[error("row {row}: {message}")]
    Table { row: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Denominators below this magnitude are treated as singular.
pub(crate) const DEGENERATE_EPS: f64 = 1e-300;
