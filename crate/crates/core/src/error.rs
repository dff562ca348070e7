//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, QacError>;

/// Errors produced by the engine, the parsers and the networked service.
#[derive(Debug, Error)]
pub enum QacError {
    /// An argument is malformed or out of the accepted domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A qubit, clbit or basis index is outside the valid range.
    #[error("out of range: {0}")]
    Range(String),

    /// A circuit or simulator name that was never registered.
    #[error("unknown name: {0}")]
    UnknownName(String),

    /// Sampling was requested on a circuit without measurement gates.
    #[error("no measurement gates: {0}")]
    NoMeasure(String),

    /// A measurement was requested on a circuit without classical bits.
    #[error("no classical bits: {0}")]
    NoClbits(String),

    /// Circuit composition violated a size or ordering constraint.
    #[error("cannot compose: {0}")]
    Composition(String),

    /// A matrix gate failed the unitarity check.
    #[error("matrix is not unitary: max |U\u{2020}U - I| = {deviation:.3e} exceeds {tolerance:.0e}")]
    NonUnitary { deviation: f64, tolerance: f64 },

    /// Malformed textual input (command language, minified notation, QASM).
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The circuit cannot be represented in the requested export format.
    #[error("unsupported export: {0}")]
    UnsupportedExport(String),

    /// The operation is outside the supported parameter range.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Grover synthesis refused: marked states must be fewer than half of all states.
    #[error("target proportion {marked}/{total} is not below one half; amplification is impossible")]
    Proportion { marked: usize, total: usize },

    /// The winning measurement fell on a padded state with no pitch label.
    #[error("winning state '{state}' has no label; resample required")]
    Resample { state: String },

    /// Malformed OSC packet.
    #[error("malformed OSC packet: {0}")]
    Wire(String),

    /// No reply arrived within the deadline.
    #[error("timed out after {0} ms")]
    Timeout(u64),

    /// The remote service replied with an error message.
    #[error("service error: {0}")]
    Remote(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl QacError {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        QacError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Restamp a parse error with the script line it came from; other
    /// error kinds pass through unchanged.
    pub fn at_line(self, line: usize) -> Self {
        match self {
            QacError::Parse {
                column, message, ..
            } => QacError::Parse {
                line,
                column,
                message,
            },
            other => other,
        }
    }
}
