//! Error type shared by all core modules.

use alloc::string::String;
use core::fmt;

/// Errors reported by the numerical core.
///
/// Every fallible operation returns [`Result`]; none panic on bad user input.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation received parameters outside its contract
    /// (empty interval list, non-positive radius, s outside [0.05, 0.95], …).
    InvalidParameter(String),
    /// A requested translation step is not an integer multiple of the grid
    /// spacing within tolerance.
    UnalignedStep(String),
    /// Two objects that must live on the same grid/mesh do not.
    GridMismatch(String),
    /// The operation is outside the implemented scope (e.g. Gagliardo
    /// seminorms in dimension ≥ 2, pointwise evaluation of non-decaying
    /// closed forms).
    Unsupported(String),
    /// An adaptive quadrature exhausted its subdivision budget before
    /// reaching the requested tolerance.
    QuadratureBudget(String),
    /// A linear solve failed (matrix not positive definite, singular pivot).
    LinearSolve(String),
    /// A sampled profile does not cover the range an estimator needs
    /// (too few steps, missing decades around the K-functional crossover).
    InsufficientCoverage(String),
    /// A closed-form descriptor string could not be parsed.
    BadDescriptor(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::UnalignedStep(m) => write!(f, "unaligned step: {m}"),
            Error::GridMismatch(m) => write!(f, "grid mismatch: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::QuadratureBudget(m) => write!(f, "quadrature budget exhausted: {m}"),
            Error::LinearSolve(m) => write!(f, "linear solve failed: {m}"),
            Error::InsufficientCoverage(m) => write!(f, "insufficient coverage: {m}"),
            Error::BadDescriptor(m) => write!(f, "bad descriptor: {m}"),
        }
    }
}

/// Convenience alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Shorthand for `Error::InvalidParameter` with formatted text.
#[macro_export]
macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::InvalidParameter(alloc::format!($($arg)*))
    };
}
