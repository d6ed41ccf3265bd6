//! Error type shared by every numerical operation in the crate.

use alloc::vec::Vec;
use core::fmt;

/// Errors surfaced by matrix, fitting, selection, and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input data contain NaN or infinite values.
    InvalidData,
    /// Index out of range for the matrix dimension.
    IndexOutOfRange { index: usize, dim: usize },
    /// Operand dimensions do not agree.
    ShapeMismatch { expected: usize, got: usize },
    /// A factorization pivot was non-positive: the matrix is not positive definite.
    NotPositiveDefinite,
    /// A diagonal entry required to be positive was not.
    DegenerateDiagonal { value_bits: u64 },
    /// The quadratic coefficient of a coordinate subproblem was non-positive.
    DegenerateSubproblem { coordinate: usize },
    /// Hyperparameters violate their invariants.
    InvalidHyperparameters(&'static str),
    /// A function was evaluated at a point excluded by its contract
    /// (the penalty derivatives at zero).
    ContractViolation(&'static str),
    /// A parameter fell outside its admissible interval.
    InvalidParameter(&'static str),
    /// The objective became non-finite during a fit.
    Divergence,
    /// An internal invariant failed; indicates a bug, not bad input.
    InternalConsistency(&'static str),
    /// Ground-truth generation could not produce a positive definite matrix.
    GenerationFailed { attempts: usize },
    /// Every grid point of a tuning run failed; carries (grid index, cause).
    TuningFailed { failures: Vec<(usize, Error)> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidData => write!(f, "input contains non-finite values"),
            Error::IndexOutOfRange { index, dim } => {
                write!(f, "index {index} out of range for dimension {dim}")
            }
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected}, got {got}")
            }
            Error::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            Error::DegenerateDiagonal { value_bits } => {
                write!(
                    f,
                    "diagonal entry must be positive, got {}",
                    f64::from_bits(*value_bits)
                )
            }
            Error::DegenerateSubproblem { coordinate } => {
                write!(f, "non-positive curvature in coordinate {coordinate} subproblem")
            }
            Error::InvalidHyperparameters(what) => write!(f, "invalid hyperparameters: {what}"),
            Error::ContractViolation(what) => write!(f, "contract violation: {what}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::Divergence => write!(f, "objective became non-finite"),
            Error::InternalConsistency(what) => write!(f, "internal consistency failure: {what}"),
            Error::GenerationFailed { attempts } => {
                write!(f, "truth-matrix generation failed after {attempts} attempts")
            }
            Error::TuningFailed { failures } => {
                write!(f, "all {} grid points failed to fit", failures.len())
            }
        }
    }
}

impl Error {
    pub(crate) fn degenerate_diagonal(value: f64) -> Self {
        Error::DegenerateDiagonal {
            value_bits: value.to_bits(),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
