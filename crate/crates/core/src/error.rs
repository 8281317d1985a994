use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("mesh mismatch: {left} vs {right}")]
    MeshMismatch { left: f64, right: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("quadrature did not converge{context}: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature {
        estimate: f64,
        tolerance: f64,
        context: String,
    },

    #[error(
        "output window radius {radius} gives tail bound {bound:e} above requested {requested:e}"
    )]
    WindowTooSmall {
        radius: usize,
        bound: f64,
        requested: f64,
    },

    #[error("kernel table radius {available} does not cover lag radius {needed}")]
    KernelCoverage { needed: usize, available: usize },

    #[error("insufficient spectral resolution: grid-doubling estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Resolution { estimate: f64, tolerance: f64 },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    /// Attach a location (e.g. the lattice point being integrated) to a quadrature failure.
    pub fn with_context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Quadrature {
                estimate,
                tolerance,
                context,
            } => Error::Quadrature {
                estimate,
                tolerance,
                context: format!("{context} at {ctx}"),
            },
            other => other,
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_)
                | Error::Quadrature { .. }
                | Error::WindowTooSmall { .. }
                | Error::KernelCoverage { .. }
                | Error::Resolution { .. }
        )
    }
}
