//! Crate error type.

use alloc::string::String;
use core::fmt;

use num_complex::Complex64;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition.
    InvalidArgument(String),
    /// Dimensions of two operands do not agree.
    DimensionMismatch { expected: usize, got: usize },
    /// A filter was evaluated exactly at one of its poles.
    PoleCollision { node: Complex64 },
    /// The filter has a pole on the search interval, so its infimum there is zero.
    DegenerateFilter,
    /// A matrix required to be symmetric positive definite is not.
    NotDefinite,
    /// The shifted matrix `zM - K` is singular (z is a discrete eigenvalue).
    SingularShift { pivot_index: usize },
    /// A linear solve finished with a residual above the admissible tolerance.
    SolveFailure { residual: f64, bound: f64 },
    /// Orthonormalization discarded every column of the input basis.
    EmptyBasis,
    /// An operation received an empty set where a nonempty one is required.
    EmptyInput,
    /// A cross-Gram matrix has singular values outside `[0, 1]`; its factors
    /// were not orthonormal in the prescribed inner product.
    NotOrthonormal { singular_value_sq: f64 },
    /// The dense oracle was asked to decompose a pencil above its size cap.
    OracleCapExceeded { n: usize, cap: usize },
    /// A solver for a required quadrature node is missing.
    MissingSolver { node_index: usize },
    /// The filter fails the spectral-separation assumption, so the subspace
    /// iteration has no convergence guarantee.
    AssumptionViolated(String),
    /// The requested metric is only defined on a specific domain.
    UnsupportedDomain(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::PoleCollision { node } => {
                write!(f, "evaluation point coincides with filter pole {node}")
            }
            Error::DegenerateFilter => {
                write!(f, "degenerate filter: |r_N| vanishes on the search interval")
            }
            Error::NotDefinite => write!(f, "matrix is not symmetric positive definite"),
            Error::SingularShift { pivot_index } => {
                write!(f, "shifted matrix is singular (zero pivot at index {pivot_index})")
            }
            Error::SolveFailure { residual, bound } => {
                write!(f, "solve residual {residual:e} exceeds bound {bound:e}")
            }
            Error::EmptyBasis => write!(f, "all basis columns are numerically degenerate"),
            Error::EmptyInput => write!(f, "input set must be nonempty"),
            Error::NotOrthonormal { singular_value_sq } => write!(
                f,
                "cross-Gram singular value squared {singular_value_sq} lies outside [0,1]; \
                 input bases are not orthonormal"
            ),
            Error::OracleCapExceeded { n, cap } => {
                write!(f, "dense oracle cap exceeded: {n} > {cap}")
            }
            Error::MissingSolver { node_index } => {
                write!(f, "no resolvent solver supplied for quadrature node {node_index}")
            }
            Error::AssumptionViolated(msg) => write!(f, "filter assumption violated: {msg}"),
            Error::UnsupportedDomain(msg) => write!(f, "unsupported domain: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
