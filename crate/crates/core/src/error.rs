use std::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-contract input (bad dimensions, violated
    /// parameter ranges, unparsable matrix files).
    InvalidInput(String),
    /// An iteration failed to converge within its cap.
    NoConvergence(String),
    /// The largest eigenvalue of `Phi(w*X)` is not simple at the given
    /// angle, so an eigenvector-based quantity is undefined there.
    NonsimpleEigenvalue { theta: f64, gap: f64 },
    /// The input is not (numerically) a disk matrix.
    NotDiskMatrix { deviation: f64 },
    /// A matrix that must be invertible is singular or too ill-conditioned.
    Singular(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::NoConvergence(msg) => write!(f, "no convergence: {msg}"),
            Error::NonsimpleEigenvalue { theta, gap } => write!(
                f,
                "nonsimple largest eigenvalue at theta = {theta:.12} (gap {gap:.3e})"
            ),
            Error::NotDiskMatrix { deviation } => {
                write!(f, "not a disk matrix (support deviation {deviation:.3e})")
            }
            Error::Singular(msg) => write!(f, "singular matrix: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
