use thiserror::Error;

/// Errors produced by the simulation and fitting routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The ODE integrator could not advance (non-finite drive, step underflow, step budget).
    #[error("integration failed at t = {t:e} s: {reason}")]
    Integration { t: f64, reason: String },

    /// Adaptive quadrature did not reach its tolerance.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound:e}")]
    Quadrature { estimate: f64, error_bound: f64 },

    /// A derivative needed by the adiabaticity diagnostic is undefined.
    #[error("diagnostic undefined at t = {t:e} s: {reason}")]
    Diagnostic { t: f64, reason: String },

    /// Input data cannot be fitted (too few points, constant values, wrong units).
    #[error("degenerate fit input: {0}")]
    DegenerateData(String),

    /// Configuration failed schema or invariant validation.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Argument(_) | Error::Config(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
