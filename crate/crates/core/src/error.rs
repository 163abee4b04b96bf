use alloc::string::String;
use core::fmt;
use num_complex::Complex64;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible domain.
    Domain(String),
    /// An index is out of range.
    Index(String),
    /// An exhaustive computation exceeds its configured size cap.
    SizeLimit(String),
    /// A normalization constant diverges.
    Divergence(String),
    /// A function was evaluated at a singular point.
    Singular(String),
    /// Contour geometry does not satisfy the nesting requirements.
    Admissibility(String),
    /// Adaptive quadrature did not reach its tolerance.
    Quadrature {
        msg: String,
        estimate: Complex64,
        err: f64,
    },
    /// A matrix or kernel fails a structural requirement.
    Structure(String),
    /// A lattice sum does not decay.
    Truncation(String),
    /// Rejection sampling ran out of attempts.
    Rejection { attempts: u64, accept_rate: f64 },
    /// A conditioned ensemble has empty support.
    Feasibility(String),
    /// Integer overflow in an exact computation.
    Overflow(String),
}

impl Error {
    /// True for errors that stem from numerics rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Truncation(_)
                | Error::Rejection { .. }
                | Error::Overflow(_)
                | Error::Singular(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "parameter domain error: {m}"),
            Error::Index(m) => write!(f, "index error: {m}"),
            Error::SizeLimit(m) => write!(f, "size limit exceeded: {m}"),
            Error::Divergence(m) => write!(f, "divergent normalization: {m}"),
            Error::Singular(m) => write!(f, "singular point: {m}"),
            Error::Admissibility(m) => write!(f, "contour admissibility violated: {m}"),
            Error::Quadrature { msg, estimate, err } => write!(
                f,
                "quadrature failed: {msg} (best estimate {} + {}i, error {err:e})",
                estimate.re, estimate.im
            ),
            Error::Structure(m) => write!(f, "structure error: {m}"),
            Error::Truncation(m) => write!(f, "truncation error: {m}"),
            Error::Rejection {
                attempts,
                accept_rate,
            } => write!(
                f,
                "rejection budget of {attempts} attempts exhausted (acceptance rate estimate {accept_rate:e})"
            ),
            Error::Feasibility(m) => write!(f, "infeasible specification: {m}"),
            Error::Overflow(m) => write!(f, "integer overflow: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
