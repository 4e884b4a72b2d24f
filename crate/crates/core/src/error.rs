use std::path::PathBuf;

/// Errors produced by the solver library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate parameter `{name}`: {reason}")]
    Degenerate { name: &'static str, reason: String },

    #[error("unsupported wavelet genus {0}: must be even and within 2..=20")]
    UnsupportedGenus(usize),

    #[error("connection coefficients of order ({d1}, {d2}) need genus > {}, got {genus}", 2 * (d1 + d2))]
    InsufficientGenus { genus: usize, d1: usize, d2: usize },

    #[error("length {len} is not divisible by 2^{levels}")]
    LengthMismatch { len: usize, levels: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:.3e}, {converged}/{wanted} pairs)")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        converged: usize,
        wanted: usize,
    },

    #[error("found {found} of {wanted} stationary modes; best rejected candidate has imaginary residual {best_rejected:.3e}")]
    InsufficientModes { found: usize, wanted: usize, best_rejected: f64 },

    #[error("linear solve stalled at step {step}: relative residual {residual:.3e}")]
    LinearSolve { step: usize, residual: f64 },

    #[error("instability at t = {time}: norm grew by {growth:.3e}")]
    Instability { time: f64, growth: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics (as opposed to bad input or i/o).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::InsufficientModes { .. }
                | Error::LinearSolve { .. }
                | Error::Instability { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
