//! Crate-wide error type.
//!
//! Errors carry `f64` diagnostics regardless of the scalar type the caller
//! works in; callers that need to dispatch on the failure family (input
//! validation vs. integration vs. truncation) can use [`Error::family`].

/// Failure family, used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFamily {
    /// Bad input: dimensions, ranges, preconditions.
    Validation,
    /// Numerical integration did not reach the requested tolerance.
    Integration,
    /// A truncated representation (Fock space, frequency span) is too small.
    Truncation,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    InvalidDimension,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("basis is not orthonormal: max Gram deviation {max_dev:.3e} exceeds {tol:.3e}")]
    NotOrthonormal { max_dev: f64, tol: f64 },

    #[error("matrix is not unitary: max deviation of u\u{2020}u from identity is {max_dev:.3e} (tolerance {tol:.3e})")]
    NotUnitary { max_dev: f64, tol: f64 },

    #[error("normalized pump power g2 = {g2} outside [0, {max}]; the model is only valid below oscillation threshold")]
    AboveThreshold { g2: f64, max: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("counting window too short: gamma*T = {gamma_t} < {min} violates the long-window assumption")]
    WindowTooShort { gamma_t: f64, min: f64 },

    #[error("projection probability {prob:.3e} is below {min:.3e}; the wavepacket is orthogonal to the pair state")]
    OrthogonalProjection { prob: f64, min: f64 },

    #[error("quadrature did not converge: error estimate {achieved:.3e} above target {requested:.3e} after {intervals} intervals")]
    Integration {
        achieved: f64,
        requested: f64,
        intervals: usize,
    },

    #[error("Fock truncation insufficient: tail mass {tail:.3e} is not below {limit:.3e}")]
    Truncation { tail: f64, limit: f64 },

    #[error("frequency span too small: estimated uncaptured kernel-weighted mass {missing:.3e} exceeds {limit:.3e}")]
    SpanCoverage { missing: f64, limit: f64 },
}

impl Error {
    pub fn family(&self) -> ErrorFamily {
        match self {
            Error::Integration { .. } => ErrorFamily::Integration,
            Error::Truncation { .. } | Error::SpanCoverage { .. } => ErrorFamily::Truncation,
            _ => ErrorFamily::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
