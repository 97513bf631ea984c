//! Scale, scatter, and covariance estimates built from the fitted weights.
//!
//! The shape fit loses the scale of the scatter matrix. The scale comes
//! back as the harmonic mean of the reciprocal weights,
//! `eta = ((1/n) sum_i w_i)^{-1}`, and the scatter estimate is then
//! `eta * shape`. Equivalently the scatter is a weighted sample
//! covariance with mean-one weights `v_i = w_i / mean(w)`; both forms are
//! computed here and compared, since a gap between them means the solver
//! did not actually converge. Unlike the raw shape fit, the rescaled
//! scatter is affine equivariant.

use crate::error::{Error, Result};
use crate::spd::{rel_frob_diff, SpdMatrix, SquareMatrix};
use crate::tyler::{DataMatrix, TylerFit};

/// Relative gap between the product form and the weighted-SCM form above
/// which the estimate is rejected as inconsistent.
const FORMS_TOL: f64 = 1e-6;

/// Scale and scatter estimate derived from a converged shape fit.
#[derive(Debug, Clone)]
pub struct TweEstimate {
    /// Scale estimate (mean eigenvalue of the scatter).
    pub scale: f64,
    /// Scatter estimate: scale times the trace-p shape matrix.
    pub scatter: SpdMatrix,
    /// Mean-one weights making the scatter a weighted sample covariance.
    pub normalized_weights: Vec<f64>,
    /// Relative gap between the two algebraic forms of the scatter.
    pub forms_gap: f64,
    /// Tail ratio used for the covariance reconstruction, when set.
    pub theta: Option<f64>,
    /// Covariance estimate theta * scatter, when theta is set.
    pub covariance: Option<SpdMatrix>,
}

/// Scale statistic: harmonic mean of the reciprocal weights,
/// `((1/n) sum_i w_i)^{-1}`.
pub fn twe_scale(fit: &TylerFit) -> f64 {
    let n = fit.weights().len() as f64;
    n / fit.weights().iter().sum::<f64>()
}

/// Robust location-free alternatives to the harmonic-mean scale, computed
/// from the reciprocal weights. Diagnostics only; nothing downstream
/// consumes them.
#[derive(Debug, Clone, Copy)]
pub struct ScaleDiagnostics {
    pub harmonic_mean: f64,
    pub median: f64,
    /// Mean after dropping the top and bottom 10% of 1/w_i.
    pub trimmed_mean: f64,
}

pub fn scale_diagnostics(fit: &TylerFit) -> ScaleDiagnostics {
    let mut recips: Vec<f64> = fit.weights().iter().map(|w| 1.0 / w).collect();
    recips.sort_by(|a, b| a.partial_cmp(b).expect("weights are finite"));
    let n = recips.len();
    let median = if n % 2 == 1 {
        recips[n / 2]
    } else {
        0.5 * (recips[n / 2 - 1] + recips[n / 2])
    };
    let trim = n / 10;
    let kept = &recips[trim..n - trim];
    let trimmed_mean = kept.iter().sum::<f64>() / kept.len() as f64;
    ScaleDiagnostics {
        harmonic_mean: twe_scale(fit),
        median,
        trimmed_mean,
    }
}

/// Scatter estimate from a converged fit and the data it was fitted on.
///
/// Returns the product form `scale * shape` after checking it against the
/// weighted-SCM form `(1/n) sum_i v_i x_i x_i'`; a relative gap beyond
/// 1e-6 fails with [`Error::InconsistentForms`].
pub fn twe_scatter(fit: &TylerFit, data: &DataMatrix) -> Result<TweEstimate> {
    let n = data.n();
    let p = data.p();
    if fit.weights().len() != n {
        return Err(Error::DimensionMismatch {
            expected: fit.weights().len(),
            got: n,
        });
    }
    if fit.shape().dim() != p {
        return Err(Error::DimensionMismatch {
            expected: fit.shape().dim(),
            got: p,
        });
    }
    let scale = twe_scale(fit);
    let scatter = fit.shape().scaled(scale)?;

    let mean_w = 1.0 / scale;
    let normalized_weights: Vec<f64> = fit.weights().iter().map(|w| w / mean_w).collect();

    // Weighted-SCM form, accumulated like the solver map.
    let mut acc = vec![0.0f64; p * p];
    for (v, x) in normalized_weights.iter().zip(data.rows()) {
        let vn = v / n as f64;
        for r in 0..p {
            let xr = vn * x[r];
            let row = &mut acc[r * p + r..(r + 1) * p];
            for (dst, &xv) in row.iter_mut().zip(&x[r..]) {
                *dst += xr * xv;
            }
        }
    }
    for r in 0..p {
        for c in r..p {
            acc[c * p + r] = acc[r * p + c];
        }
    }
    let scm_form = SquareMatrix::from_vec(p, acc).expect("accumulator is p x p");
    let forms_gap = rel_frob_diff(&scm_form, scatter.matrix());
    if forms_gap > FORMS_TOL {
        return Err(Error::InconsistentForms { gap: forms_gap });
    }

    Ok(TweEstimate {
        scale,
        scatter,
        normalized_weights,
        forms_gap,
        theta: None,
        covariance: None,
    })
}

/// Convex combination of the scatter with its own scale times the
/// identity: `beta * scatter + (1 - beta) * scale * I`. The mean
/// eigenvalue is preserved exactly.
pub fn shrink_scatter(est: &TweEstimate, beta: f64) -> Result<SpdMatrix> {
    if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
        return Err(Error::BetaOutOfRange { beta });
    }
    let p = est.scatter.dim();
    let target = SquareMatrix::identity(p).scaled((1.0 - beta) * est.scale);
    let combined = target.add_scaled(est.scatter.matrix(), beta)?;
    SpdMatrix::new(combined)
}

/// Covariance reconstruction `theta * scatter` for a known tail ratio
/// theta >= 1 (theta = 1 recovers the Gaussian case).
pub fn twe_covariance(est: &TweEstimate, theta: f64) -> Result<SpdMatrix> {
    if !theta.is_finite() || theta < 1.0 {
        return Err(Error::InvalidTheta { theta });
    }
    est.scatter.scaled(theta)
}

impl TweEstimate {
    /// Attach the covariance reconstruction for the given tail ratio.
    pub fn with_covariance(mut self, theta: f64) -> Result<Self> {
        let cov = twe_covariance(&self, theta)?;
        self.theta = Some(theta);
        self.covariance = Some(cov);
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tyler::{fit_tyler, TylerOptions};

    fn fit_on(rows: &[Vec<f64>]) -> (TylerFit, DataMatrix) {
        let data = DataMatrix::from_rows(rows).unwrap();
        let fit = fit_tyler(&data, &TylerOptions::default()).unwrap();
        (fit, data)
    }

    #[test]
    fn harmonic_mean_of_unit_weights_is_one() {
        // unit-axis data in 2d: all quadratic forms are 1, weights are 2
        let (fit, _) = fit_on(&[
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ]);
        // weights 2 each, scale = 1/2
        assert!((twe_scale(&fit) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scalar_case_scale_and_weights() {
        let (fit, data) = fit_on(&[vec![1.0], vec![2.0]]);
        let scale = twe_scale(&fit);
        assert!((scale - 1.6).abs() < 1e-12);
        let est = twe_scatter(&fit, &data).unwrap();
        assert!((est.scatter.get(0, 0) - 1.6).abs() < 1e-12);
        assert!((est.normalized_weights[0] - 1.6).abs() < 1e-12);
        assert!((est.normalized_weights[1] - 0.4).abs() < 1e-12);
        // weighted-SCM check: (1/2)(1.6*1 + 0.4*4) = 1.6
        assert!(est.forms_gap < 1e-12);
    }

    #[test]
    fn axis_data_with_sqrt2_norms_gives_identity_scatter() {
        let s = std::f64::consts::SQRT_2;
        let (fit, data) = fit_on(&[vec![s, 0.0], vec![-s, 0.0], vec![0.0, s], vec![0.0, -s]]);
        let est = twe_scatter(&fit, &data).unwrap();
        assert!((est.scale - 1.0).abs() < 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((est.scatter.get(i, j) - want).abs() < 1e-10);
            }
        }
        for v in &est.normalized_weights {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_axis_data_gives_half_identity_scatter() {
        // quadratic forms are 1 at the identity shape, so the weights are
        // p = 2, the scale is 1/2, and the scatter is I/2. The mean-one
        // weights are all 1 and the weighted SCM reproduces I/2 exactly.
        let (fit, data) = fit_on(&[
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ]);
        let est = twe_scatter(&fit, &data).unwrap();
        assert!((est.scale - 0.5).abs() < 1e-12);
        assert!((est.scatter.get(0, 0) - 0.5).abs() < 1e-12);
        assert!((est.scatter.get(1, 1) - 0.5).abs() < 1e-12);
        for v in &est.normalized_weights {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normalized_weights_have_mean_one() {
        let (fit, data) = fit_on(&[
            vec![1.0, 0.2],
            vec![-0.4, 1.3],
            vec![0.7, -0.9],
            vec![2.0, 0.1],
            vec![-1.1, -0.6],
        ]);
        let est = twe_scatter(&fit, &data).unwrap();
        let mean: f64 =
            est.normalized_weights.iter().sum::<f64>() / est.normalized_weights.len() as f64;
        assert!((mean - 1.0).abs() < 1e-10);
        // scale is the mean eigenvalue of the scatter
        assert!((est.scatter.trace_mean() - est.scale).abs() < 1e-10 * est.scale);
    }

    #[test]
    fn shrinkage_endpoints() {
        let (fit, data) = fit_on(&[
            vec![1.0, 0.2],
            vec![-0.4, 1.3],
            vec![0.7, -0.9],
            vec![2.0, 0.1],
        ]);
        let est = twe_scatter(&fit, &data).unwrap();
        let full = shrink_scatter(&est, 1.0).unwrap();
        assert!(rel_frob_diff(full.matrix(), est.scatter.matrix()) < 1e-15);
        let none = shrink_scatter(&est, 0.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { est.scale } else { 0.0 };
                assert!((none.get(i, j) - want).abs() < 1e-15);
            }
        }
        assert!(matches!(
            shrink_scatter(&est, 1.5),
            Err(Error::BetaOutOfRange { .. })
        ));
        assert!(matches!(
            shrink_scatter(&est, -0.1),
            Err(Error::BetaOutOfRange { .. })
        ));
    }

    #[test]
    fn shrinkage_halfway_arithmetic() {
        // scatter diag(2, 0.5), scale 1.25: beta 0.5 gives diag(1.625, 0.875)
        let est = TweEstimate {
            scale: 1.25,
            scatter: SpdMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap(),
            normalized_weights: vec![1.0; 4],
            forms_gap: 0.0,
            theta: None,
            covariance: None,
        };
        let half = shrink_scatter(&est, 0.5).unwrap();
        assert!((half.get(0, 0) - 1.625).abs() < 1e-15);
        assert!((half.get(1, 1) - 0.875).abs() < 1e-15);
        assert!((half.trace_mean() - est.scale).abs() < 1e-15);
    }

    #[test]
    fn covariance_reconstruction() {
        let (fit, data) = fit_on(&[
            vec![1.0, 0.2],
            vec![-0.4, 1.3],
            vec![0.7, -0.9],
            vec![2.0, 0.1],
        ]);
        let est = twe_scatter(&fit, &data).unwrap();
        let gaussian = twe_covariance(&est, 1.0).unwrap();
        assert!(rel_frob_diff(gaussian.matrix(), est.scatter.matrix()) < 1e-15);
        let t5 = twe_covariance(&est, 5.0 / 3.0).unwrap();
        assert!(
            (t5.get(0, 0) - 5.0 / 3.0 * est.scatter.get(0, 0)).abs()
                < 1e-14 * est.scatter.get(0, 0)
        );
        assert!(matches!(
            twe_covariance(&est, 0.8),
            Err(Error::InvalidTheta { .. })
        ));
        // the Gaussian-or-lighter sentinel maps to theta = 1
        let est2 = est
            .with_covariance(crate::elliptical::Nu::Infinite.theta().unwrap())
            .unwrap();
        assert!(
            rel_frob_diff(
                est2.covariance.as_ref().unwrap().matrix(),
                est2.scatter.matrix()
            ) < 1e-15
        );
    }

    #[test]
    fn diagnostics_on_scalar_case() {
        let (fit, _) = fit_on(&[vec![1.0], vec![2.0]]);
        let d = scale_diagnostics(&fit);
        assert!((d.harmonic_mean - 1.6).abs() < 1e-12);
        // reciprocals are {1, 4}
        assert!((d.median - 2.5).abs() < 1e-12);
        assert!((d.trimmed_mean - 2.5).abs() < 1e-12);
    }
}
