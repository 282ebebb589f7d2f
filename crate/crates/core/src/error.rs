use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical kernel, the analyses and the scenario layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian: defect {defect:.3e} exceeds {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("generator does not produce a contraction semigroup: eigenvalue {re:.6e}{im:+.6e}i has positive real part")]
    NotContraction { re: f64, im: f64 },

    #[error("peripheral eigenvalue {re:.6e}{im:+.6e}i is defective; input is not a valid CPTP semigroup generator")]
    DefectivePeripheral { re: f64, im: f64 },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{path}: parse error: {message}")]
    Parse { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    /// Process exit code associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
