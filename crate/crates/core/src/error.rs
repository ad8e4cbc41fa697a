//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by the numerics, precoder, modem, harness and CLI layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand dimensions do not fit the operation.
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    /// A factorization met a pivot too small to continue.
    #[error("matrix is numerically singular (pivot magnitude {pivot:.3e} at index {index})")]
    Singular { pivot: f64, index: usize },

    /// A precoder with zero total power cannot be normalized.
    #[error("degenerate precoder: trace(F F^H) = {trace:.3e}")]
    DegeneratePrecoder { trace: f64 },

    /// A configuration key holds a value outside its domain.
    #[error("invalid configuration for `{key}`: expected {expected}, got `{got}`")]
    Config { key: String, expected: String, got: String },

    /// Bit block length is incompatible with the symbol mapping.
    #[error("framing error: {0}")]
    Framing(String),

    /// A requested record is missing from a result table.
    #[error("no record for scheme {scheme} at {snr_db} dB")]
    Lookup { scheme: String, snr_db: f64 },

    /// A Monte Carlo realization failed numerically.
    #[error("realization {realization} of {scheme} at {snr_db} dB failed: {source}")]
    Realization {
        scheme: String,
        snr_db: f64,
        realization: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed data in {path}: {detail}")]
    Parse { path: String, detail: String },
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, expected: impl Into<String>, got: impl ToString) -> Self {
        Error::Config {
            key: key.into(),
            expected: expected.into(),
            got: got.to_string(),
        }
    }

    /// Process exit code for this error: 1 configuration, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Lookup { .. } => 1,
            Error::Io { .. } | Error::Parse { .. } => 3,
            Error::Shape { .. }
            | Error::Singular { .. }
            | Error::DegeneratePrecoder { .. }
            | Error::Framing(_)
            | Error::Realization { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
