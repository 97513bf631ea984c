//! Elliptical density generators and the scatter-to-covariance ratio.
//!
//! For a centered elliptical vector with scatter Sigma and density
//! generator g, the covariance is R = theta * Sigma with
//! theta = E[r^2]/p, where r^2 is the squared Mahalanobis radius. The
//! radial density is f(t) proportional to t^{p/2-1} g(t), so theta is a
//! functional of g alone: theta = h(nu) when g is indexed by a tail
//! parameter nu. For the multivariate t family h has the closed form
//! nu/(nu-2), invertible as nu = 2 theta/(theta - 1).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::integrate_half_line;

/// Guard band above theta = 1: smaller ratios are treated as Gaussian
/// (or lighter) tails so sampling noise cannot blow up the inverse map.
pub const THETA_EPS: f64 = 1e-6;
/// Clamp range for finite tail-parameter estimates. The inverse map
/// requires nu > 2; above 1000 the tail is indistinguishable from
/// Gaussian at realistic sample sizes.
pub const NU_MIN: f64 = 2.01;
pub const NU_MAX: f64 = 1000.0;

/// Relative tolerance for radial-moment quadrature.
const QUAD_TOL: f64 = 1e-8;

/// Tail parameter: finite degrees of freedom or the Gaussian-or-lighter
/// sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nu {
    Finite(f64),
    Infinite,
}

impl Nu {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Nu::Infinite)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            Nu::Finite(v) => Some(*v),
            Nu::Infinite => None,
        }
    }

    /// theta = h(nu), taking the Gaussian limit for the sentinel.
    pub fn theta(&self) -> Result<f64> {
        match self {
            Nu::Finite(v) => theta_mvt(*v),
            Nu::Infinite => Ok(1.0),
        }
    }
}

impl fmt::Display for Nu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nu::Finite(v) => write!(f, "{v}"),
            Nu::Infinite => write!(f, "inf"),
        }
    }
}

/// theta = nu/(nu - 2) for the multivariate t family; requires nu > 2
/// for the covariance to exist. Strictly decreasing, tending to 1.
pub fn theta_mvt(nu: f64) -> Result<f64> {
    if !nu.is_finite() {
        return Err(Error::NonFinite { context: "nu" });
    }
    if nu <= 2.0 {
        return Err(Error::TailTooHeavy { nu });
    }
    Ok(nu / (nu - 2.0))
}

/// Inverse of the multivariate-t tail map: nu = 2 theta/(theta - 1) for
/// theta > 1. Ratios at or below 1 + [`THETA_EPS`] return the
/// [`Nu::Infinite`] sentinel; finite results are clamped to
/// [[`NU_MIN`], [`NU_MAX`]].
pub fn nu_from_theta(theta: f64) -> Result<Nu> {
    if !theta.is_finite() {
        return Err(Error::NonFinite { context: "theta" });
    }
    if theta <= 1.0 + THETA_EPS {
        return Ok(Nu::Infinite);
    }
    let nu = 2.0 * theta / (theta - 1.0);
    Ok(Nu::Finite(nu.clamp(NU_MIN, NU_MAX)))
}

#[derive(Clone)]
enum Generator {
    Gaussian,
    Mvt {
        nu: f64,
    },
    Custom {
        g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

/// A density generator g for a p-variate elliptical family, evaluating
/// g(t), the radial density of r^2, and the ratio theta.
///
/// The p-variate normalizing constant is never needed (it cancels in
/// every implemented quantity) and is not stored; only the radial
/// normalizer is kept, computed once at construction.
#[derive(Clone)]
pub struct DensityGenerator {
    kind: Generator,
    dim: usize,
    /// Radial normalizer: integral of t^{p/2-1} g(t) over (0, inf).
    radial_norm: f64,
}

impl fmt::Debug for DensityGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.kind {
            Generator::Gaussian => "Gaussian".to_string(),
            Generator::Mvt { nu } => format!("Mvt(nu={nu})"),
            Generator::Custom { .. } => "Custom".to_string(),
        };
        write!(f, "DensityGenerator({name}, p={})", self.dim)
    }
}

impl DensityGenerator {
    /// Gaussian family: g(t) = exp(-t/2).
    pub fn gaussian(dim: usize) -> Result<Self> {
        Self::build(Generator::Gaussian, dim)
    }

    /// Multivariate t with nu > 0 degrees of freedom:
    /// g(t) = (1 + t/nu)^{-(p+nu)/2}.
    pub fn mvt(dim: usize, nu: f64) -> Result<Self> {
        if nu <= 0.0 || !nu.is_finite() {
            return Err(Error::NonFinite { context: "nu" });
        }
        Self::build(Generator::Mvt { nu }, dim)
    }

    /// User-supplied nonnegative generator on t >= 0. The radial
    /// normalizer must be finite; this is checked numerically here and
    /// construction fails otherwise.
    pub fn custom<F>(dim: usize, g: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::build(Generator::Custom { g: Arc::new(g) }, dim)
    }

    fn build(kind: Generator, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let mut gen = Self {
            kind,
            dim,
            radial_norm: f64::NAN,
        };
        let a = dim as f64 / 2.0 - 1.0;
        gen.radial_norm = integrate_half_line(|ln_t| gen.ln_moment_integrand(a, ln_t), QUAD_TOL)?;
        Ok(gen)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Tail parameter when the family has one.
    pub fn nu(&self) -> Nu {
        match &self.kind {
            Generator::Mvt { nu } => Nu::Finite(*nu),
            _ => Nu::Infinite,
        }
    }

    /// g(t).
    pub fn g(&self, t: f64) -> f64 {
        match &self.kind {
            Generator::Gaussian => (-t / 2.0).exp(),
            Generator::Mvt { nu } => {
                let p_nu = (self.dim as f64 + nu) / 2.0;
                (-p_nu * (t / nu).ln_1p()).exp()
            }
            Generator::Custom { g } => g(t),
        }
    }

    /// ln g(e^{ln_t}), stable for ln_t far outside the representable
    /// range of t itself.
    fn ln_g(&self, ln_t: f64) -> f64 {
        match &self.kind {
            Generator::Gaussian => {
                let t = ln_t.exp();
                -t / 2.0
            }
            Generator::Mvt { nu } => {
                let p_nu = (self.dim as f64 + nu) / 2.0;
                // ln(1 + t/nu) = softplus(ln t - ln nu)
                let u = ln_t - nu.ln();
                let ln1p = if u > 35.0 {
                    u
                } else if u < -35.0 {
                    u.exp()
                } else {
                    u.exp().ln_1p()
                };
                -p_nu * ln1p
            }
            Generator::Custom { g } => {
                let t = ln_t.exp();
                if !t.is_finite() {
                    return f64::NEG_INFINITY;
                }
                let v = g(t);
                if v <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    v.ln()
                }
            }
        }
    }

    /// ln of t^a g(t) at t = e^{ln_t}.
    fn ln_moment_integrand(&self, a: f64, ln_t: f64) -> f64 {
        let lg = self.ln_g(ln_t);
        if lg == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        a * ln_t + lg
    }

    /// Density of the squared Mahalanobis radius,
    /// f(t) = t^{p/2-1} g(t) / normalizer.
    pub fn radial_density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let a = self.dim as f64 / 2.0 - 1.0;
        (self.ln_moment_integrand(a, t.ln()) - self.radial_norm.ln()).exp()
    }

    /// theta by adaptive quadrature of the first radial moment:
    /// (integral of t^{p/2} g) / (p * integral of t^{p/2-1} g).
    ///
    /// Fails with `DivergentIntegral` when the first moment does not
    /// exist (tail too heavy for a covariance).
    pub fn theta_numeric(&self) -> Result<f64> {
        let a = self.dim as f64 / 2.0;
        let first_moment = integrate_half_line(|ln_t| self.ln_moment_integrand(a, ln_t), QUAD_TOL)?;
        Ok(first_moment / (self.dim as f64 * self.radial_norm))
    }

    /// theta via the closed form where the family has one, otherwise by
    /// quadrature.
    pub fn theta(&self) -> Result<f64> {
        match &self.kind {
            Generator::Gaussian => Ok(1.0),
            Generator::Mvt { nu } => theta_mvt(*nu),
            Generator::Custom { .. } => self.theta_numeric(),
        }
    }
}
