//! Tail-parameter learning for elliptical families.
//!
//! Three estimators of the degrees of freedom nu of a multivariate t
//! sample, all reducible to inverting theta = h(nu):
//!
//! * `estimate_nu_twe`: theta is the ratio of the sample-covariance scale
//!   tr(S)/p to the weights-based robust scale; one shape fit, no outer
//!   iteration.
//! * `estimate_nu_opp`: interleaves one weighted-covariance step of the
//!   t-family scatter MLE at the current nu with the trace-ratio update
//!   theta = tr(S)/tr(Sigma), started from the kurtosis estimate and
//!   stopped on the relative change of nu.
//! * `estimate_nu_kurtosis`: inverts the average marginal excess
//!   kurtosis through the t-family identity kappa = 2/(nu - 4).
//!
//! The two baselines are reconstructions of published estimators whose
//! finite-sample details are not spelled out where they are cited; both
//! were calibrated against the reference benchmark values (see the
//! benchmark suite) before freezing.

use std::fmt;

use crate::elliptical::{nu_from_theta, theta_mvt, Nu};
use crate::error::{Error, Result};
use crate::spd::{rel_frob_diff, SpdMatrix, SquareMatrix};
use crate::twe::twe_scale;
use crate::tyler::{fit_tyler, DataMatrix, TylerOptions};

/// Which estimator produced a [`NuEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Kurtosis,
    Opp,
    Twe,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Kurtosis, Method::Opp, Method::Twe];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::Kurtosis => "kurtosis",
            Method::Opp => "opp",
            Method::Twe => "twe",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kurtosis" | "kurt" => Ok(Method::Kurtosis),
            "opp" => Ok(Method::Opp),
            "twe" => Ok(Method::Twe),
            other => Err(format!(
                "unknown method '{other}' (expected twe, opp, kurtosis)"
            )),
        }
    }
}

/// Estimated tail parameter with its implied ratio and diagnostics.
#[derive(Debug, Clone)]
pub struct NuEstimate {
    /// Estimated degrees of freedom, clamped to the supported range when
    /// finite; the sentinel marks a Gaussian-or-lighter tail.
    pub nu: Nu,
    /// h(nu) for finite estimates; the raw measured ratio when the
    /// estimate is the sentinel.
    pub theta_hat: f64,
    pub method: Method,
    /// Outer iterations (fixed-point count for the iterative methods).
    pub iterations: usize,
    /// Per-iteration absolute changes of nu (iterative methods only).
    pub residuals: Vec<f64>,
}

/// Sample covariance of centered data: (1/n) sum_i x_i x_i', with no mean
/// subtraction. The result may be rank-deficient for n < p; trace-only
/// consumers tolerate that, and consumers that factor it surface
/// degeneracy at that point.
pub fn sample_cov(data: &DataMatrix) -> SquareMatrix {
    let p = data.p();
    let n = data.n();
    let mut acc = vec![0.0f64; p * p];
    for x in data.rows() {
        for r in 0..p {
            let xr = x[r];
            let row = &mut acc[r * p + r..(r + 1) * p];
            for (dst, &xv) in row.iter_mut().zip(&x[r..]) {
                *dst += xr * xv;
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    for r in 0..p {
        for c in r..p {
            let v = acc[r * p + c] * inv_n;
            acc[r * p + c] = v;
            acc[c * p + r] = v;
        }
    }
    SquareMatrix::from_vec(p, acc).expect("accumulator is p x p")
}

/// Tail estimate from the robust-scale ratio: fit the shape, recover the
/// scale from the weights, set theta = (tr(S)/p) / scale, and invert the
/// t-family map.
pub fn estimate_nu_twe(data: &DataMatrix, opts: &TylerOptions) -> Result<NuEstimate> {
    let fit = fit_tyler(data, opts)?;
    let eta = twe_scale(&fit);
    let theta_raw = sample_cov(data).trace_mean() / eta;
    let nu = nu_from_theta(theta_raw)?;
    let theta_hat = match nu {
        Nu::Finite(v) => theta_mvt(v)?,
        Nu::Infinite => theta_raw,
    };
    Ok(NuEstimate {
        nu,
        theta_hat,
        method: Method::Twe,
        iterations: fit.iterations(),
        residuals: Vec::new(),
    })
}

/// One weighted-covariance step of the t-family scatter fixed point:
/// (1/n) sum_i ((p + nu)/(nu + x_i' S^{-1} x_i)) x_i x_i'.
fn t_weighted_scm_step(
    scatter: &SpdMatrix,
    data: &DataMatrix,
    nu: f64,
    y: &mut [f64],
) -> Result<SpdMatrix> {
    let (n, p) = (data.n(), data.p());
    let pf = p as f64;
    let mut acc = vec![0.0f64; p * p];
    for (i, x) in data.rows().enumerate() {
        scatter.forward_solve_into(x, y);
        let q: f64 = y.iter().map(|v| v * v).sum();
        if !q.is_finite() {
            return Err(Error::SingularIterate { index: i, value: q });
        }
        let w = (pf + nu) / (nu + q);
        for r in 0..p {
            let xr_w = w * x[r];
            let row = &mut acc[r * p + r..(r + 1) * p];
            for (dst, &xv) in row.iter_mut().zip(&x[r..]) {
                *dst += xr_w * xv;
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    for r in 0..p {
        for c in r..p {
            let v = acc[r * p + c] * inv_n;
            acc[r * p + c] = v;
            acc[c * p + r] = v;
        }
    }
    SpdMatrix::new(SquareMatrix::from_vec(p, acc)?)
}

fn scm_as_spd(data: &DataMatrix) -> Result<SpdMatrix> {
    SpdMatrix::new(sample_cov(data)).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => Error::DegenerateData {
            reason: "sample covariance is not positive definite".into(),
        },
        other => other,
    })
}

fn require_tall(data: &DataMatrix) -> Result<()> {
    let (n, p) = (data.n(), data.p());
    if n <= p {
        return Err(Error::DegenerateData {
            reason: format!("n = {n} samples but dimension p = {p}; need n > p"),
        });
    }
    Ok(())
}

/// Scatter MLE of the t family with known nu: fixed point of
/// `Sigma = (1/n) sum_i ((p + nu)/(nu + x_i' Sigma^{-1} x_i)) x_i x_i'`,
/// started from the sample covariance. No trace normalization; this
/// estimator keeps its scale.
pub fn mvt_mle_scatter(data: &DataMatrix, nu: f64, tol: f64, max_iter: usize) -> Result<SpdMatrix> {
    require_tall(data)?;
    if nu <= 0.0 || !nu.is_finite() {
        return Err(Error::NonFinite { context: "nu" });
    }
    mvt_mle_scatter_from(data, nu, tol, max_iter, scm_as_spd(data)?)
}

fn mvt_mle_scatter_from(
    data: &DataMatrix,
    nu: f64,
    tol: f64,
    max_iter: usize,
    init: SpdMatrix,
) -> Result<SpdMatrix> {
    let mut scatter = init;
    let mut y = vec![0.0f64; data.p()];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let next = t_weighted_scm_step(&scatter, data, nu, &mut y)?;
        residual = rel_frob_diff(next.matrix(), scatter.matrix());
        scatter = next;
        if residual < tol {
            return Ok(scatter);
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual,
        last_nu: None,
    })
}

/// Start value when the kurtosis initializer reports the sentinel.
const OPP_GAUSSIAN_START: f64 = 100.0;

/// Iterative tail estimate: from the kurtosis start and the sample
/// covariance, repeat one weighted-covariance step of the scatter MLE at
/// the current nu, set theta = tr(S)/tr(Sigma), and invert; stop when
/// |nu_{k+1} - nu_k| < tol * max(1, nu_k).
///
/// The scatter step and the tail update are interleaved one-for-one (the
/// scatter is never iterated to convergence at a fixed nu); the joint
/// recursion with this stopping rule is what reproduces the published
/// benchmark behavior of the estimator. A sentinel update (trace ratio at
/// or below the Gaussian guard band) returns immediately with the
/// sentinel.
pub fn estimate_nu_opp(data: &DataMatrix, tol: f64, max_iter: usize) -> Result<NuEstimate> {
    require_tall(data)?;
    let scm_trace_mean = sample_cov(data).trace_mean();
    let mut nu = match estimate_nu_kurtosis(data)?.nu {
        Nu::Finite(v) => v,
        Nu::Infinite => OPP_GAUSSIAN_START,
    };
    let mut scatter = scm_as_spd(data)?;
    let mut y = vec![0.0f64; data.p()];
    let mut residuals = Vec::new();
    for iter in 1..=max_iter {
        scatter = t_weighted_scm_step(&scatter, data, nu, &mut y)?;
        let theta_hat = scm_trace_mean / scatter.trace_mean();
        let next = match nu_from_theta(theta_hat)? {
            Nu::Finite(v) => v,
            Nu::Infinite => {
                return Ok(NuEstimate {
                    nu: Nu::Infinite,
                    theta_hat,
                    method: Method::Opp,
                    iterations: iter,
                    residuals,
                });
            }
        };
        let delta = (next - nu).abs();
        residuals.push(delta);
        let done = delta < tol * nu.max(1.0);
        nu = next;
        if done {
            return Ok(NuEstimate {
                nu: Nu::Finite(nu),
                theta_hat: theta_mvt(nu)?,
                method: Method::Opp,
                iterations: iter,
                residuals,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: residuals.last().copied().unwrap_or(f64::INFINITY),
        last_nu: Some(nu),
    })
}

/// Default stopping rule for [`estimate_nu_opp`].
pub const OPP_DEFAULT_TOL: f64 = 1e-3;
pub const OPP_DEFAULT_MAX_ITER: usize = 100;

/// Moment-based tail estimate: the average per-coordinate sample excess
/// kurtosis (with the standard finite-sample bias correction, which is
/// what requires n >= 4), divided by 3, estimates the elliptical kurtosis
/// kappa = 2/(nu - 4); inverting gives nu = 2/kappa + 4 for kappa > 0 and
/// the sentinel otherwise.
pub fn estimate_nu_kurtosis(data: &DataMatrix) -> Result<NuEstimate> {
    let (n, p) = (data.n(), data.p());
    if n < 4 {
        return Err(Error::TooFewSamples { n, min: 4 });
    }
    let nf = n as f64;
    let mut kurt_sum = 0.0;
    for j in 0..p {
        let mean: f64 = data.rows().map(|x| x[j]).sum::<f64>() / nf;
        let (mut m2, mut m4) = (0.0f64, 0.0f64);
        for x in data.rows() {
            let d = x[j] - mean;
            let d2 = d * d;
            m2 += d2;
            m4 += d2 * d2;
        }
        m2 /= nf;
        m4 /= nf;
        let g2 = m4 / (m2 * m2) - 3.0;
        // unbiased-under-normality correction
        kurt_sum += ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
    }
    let kappa = kurt_sum / (3.0 * p as f64);
    let (nu, theta_hat) = if kappa > 0.0 {
        let nu = (2.0 / kappa + 4.0).clamp(crate::elliptical::NU_MIN, crate::elliptical::NU_MAX);
        (Nu::Finite(nu), theta_mvt(nu)?)
    } else {
        (Nu::Infinite, 1.0)
    };
    Ok(NuEstimate {
        nu,
        theta_hat,
        method: Method::Kurtosis,
        iterations: 0,
        residuals: Vec::new(),
    })
}
