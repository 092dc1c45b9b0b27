use thiserror::Error;

/// Errors raised by constructors and evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the range where the object is defined.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An index (degree, order, harmonic label) is out of range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// A point does not belong to the domain it was declared on.
    #[error("point outside domain {domain}: {detail}")]
    PointOutsideDomain { domain: &'static str, detail: String },

    /// Explicit bases exist only for a few dimensions.
    #[error("unsupported dimension d = {0} (explicit bases exist for d = 2, 3)")]
    UnsupportedDimension(usize),

    /// A harness configuration is malformed or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The tridiagonal eigen-solver did not converge.
    #[error("eigenvalue iteration failed to converge for index {index} after {iterations} sweeps (n = {size})")]
    NoConvergence {
        index: usize,
        iterations: usize,
        size: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_gt(name: &'static str, value: f64, bound: f64, reason: &'static str) -> Result<()> {
    if value.is_finite() && value > bound {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}

pub(crate) fn check_ge(name: &'static str, value: f64, bound: f64, reason: &'static str) -> Result<()> {
    if value.is_finite() && value >= bound {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}
