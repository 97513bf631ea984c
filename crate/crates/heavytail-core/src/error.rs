//! Error type shared by all estimators.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input matrix asymmetry exceeds the construction tolerance.
    #[error("matrix is not symmetric: max relative asymmetry {max_asym:.3e}")]
    NotSymmetric { max_asym: f64 },

    /// Cholesky pivot was nonpositive or non-finite.
    #[error("matrix is not positive definite: pivot {pivot:.3e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value: {context}")]
    NonFinite { context: &'static str },

    #[error("degenerate data: {reason}")]
    DegenerateData { reason: String },

    /// Fixed-point iteration hit the iteration cap. Carries the final
    /// residual (and, for scalar iterations, the last iterate) as diagnostics.
    #[error("did not converge in {iterations} iterations (residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        last_nu: Option<f64>,
    },

    /// A quadratic form collapsed below the representable floor mid-iteration.
    #[error("singular iterate: quadratic form {value:.3e} for sample {index}")]
    SingularIterate { index: usize, value: f64 },

    /// Covariance does not exist for this tail parameter.
    #[error("tail too heavy: nu = {nu} requires nu > 2 for a covariance matrix")]
    TailTooHeavy { nu: f64 },

    #[error("integral does not converge (heavy tail or invalid density generator)")]
    DivergentIntegral,

    /// The scatter product form and the weighted-SCM form disagree,
    /// which signals a solver convergence failure.
    #[error("scatter forms disagree: relative gap {gap:.3e}")]
    InconsistentForms { gap: f64 },

    #[error("shrinkage coefficient beta = {beta} outside [0, 1]")]
    BetaOutOfRange { beta: f64 },

    #[error("invalid theta = {theta}: must be finite and >= 1")]
    InvalidTheta { theta: f64 },

    #[error("AR(1) correlation rho = {rho} outside (-1, 1)")]
    InvalidRho { rho: f64 },

    #[error("scale eta = {eta} must be positive and finite")]
    InvalidEta { eta: f64 },

    #[error("too few samples: n = {n}, need at least {min}")]
    TooFewSamples { n: usize, min: usize },

    #[error("invalid experiment design: {reason}")]
    InvalidDesign { reason: String },
}

impl Error {
    /// True for failures of the numerical routines themselves, as opposed
    /// to rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::SingularIterate { .. }
                | Error::DivergentIntegral
                | Error::InconsistentForms { .. }
                | Error::NotPositiveDefinite { .. }
        )
    }
}
