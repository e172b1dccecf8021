use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("special function out of range: {0}")]
    Range(String),

    #[error("multipole series not converged after {terms} terms (tail estimate {tail:.3e})")]
    NotConverged { terms: usize, tail: f64 },

    #[error("frequency grid: {0}")]
    Grid(String),

    #[error("unresolved resonance: half width {half_width:.3e} spans {points:.1} grid points, need at least {required}")]
    Unresolved {
        half_width: f64,
        points: f64,
        required: usize,
    },

    #[error("solver instability at t = {t:.6e}: total occupation {total:.6} exceeds bound; reduce dt")]
    Instability { t: f64, total: f64 },

    #[error("symmetry violated: {0}")]
    Symmetry(String),

    #[error("lorentzian fit: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Range(_)
                | Error::NotConverged { .. }
                | Error::Instability { .. }
                | Error::Fit(_)
                | Error::Unresolved { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
