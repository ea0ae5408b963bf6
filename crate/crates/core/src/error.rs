use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions; carries the best estimate.
    #[error("quadrature did not converge: value {value:e} with error estimate {err_est:e} after {subdivisions} subdivisions")]
    Convergence {
        value: f64,
        err_est: f64,
        subdivisions: usize,
    },

    /// A series could not be certified within its term cap.
    #[error("series truncation failed after {terms} terms: remaining tail bound {tail_bound:e} exceeds {target:e}")]
    Truncation {
        terms: usize,
        tail_bound: f64,
        target: f64,
    },

    /// A moment of the mixing law does not exist for these parameters.
    #[error("{moment} is undefined: {reason}")]
    MomentUndefined {
        moment: &'static str,
        reason: String,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by invalid input rather than numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::MomentUndefined { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
