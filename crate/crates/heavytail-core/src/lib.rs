//! Robust scale and scatter estimation for centered elliptical data.
//!
//! The pipeline: solve the distribution-free shape-matrix fixed point
//! under the trace-p convention ([`tyler`]), recover the lost scale from
//! the fitted weights ([`twe`]), and learn the tail parameter of the
//! family from the ratio of the sample-covariance scale to the robust
//! scale ([`tail`]). [`sampling`] generates the synthetic heavy-tailed
//! data used by the benchmark harness.

pub mod elliptical;
pub mod error;
mod quadrature;
pub mod sampling;
pub mod spd;
pub mod tail;
pub mod twe;
pub mod tyler;

pub use elliptical::{nu_from_theta, theta_mvt, DensityGenerator, Nu, NU_MAX, NU_MIN, THETA_EPS};
pub use error::{Error, Result};
pub use sampling::{ar1_scatter, replication_rng, sample_elliptical, sample_mvt, ExperimentDesign};
pub use spd::{rel_frob_diff, SpdMatrix, SquareMatrix};
pub use tail::{
    estimate_nu_kurtosis, estimate_nu_opp, estimate_nu_twe, mvt_mle_scatter, sample_cov, Method,
    NuEstimate,
};
pub use twe::{
    scale_diagnostics, shrink_scatter, twe_covariance, twe_scale, twe_scatter, ScaleDiagnostics,
    TweEstimate,
};
pub use tyler::{fit_tyler, tyler_map, DataMatrix, TylerFit, TylerOptions};
