//! Seeded synthetic data generation for the benchmark experiments.
//!
//! Replications draw from independent substreams of a counter-based
//! generator: the stream id is the replication index, so any scheduling
//! of parallel replications reproduces the same data. Heavy-tailed
//! samples use the exact normal/chi-square mixture representation
//! `x = L z sqrt(nu/q)`; general elliptical samples use `x = r L u` with
//! `u` uniform on the unit sphere.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::elliptical::Nu;
use crate::error::{Error, Result};
use crate::spd::{SpdMatrix, SquareMatrix};
use crate::tyler::DataMatrix;

/// Parameters of one Monte-Carlo experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentDesign {
    pub p: usize,
    pub n: usize,
    /// Degrees of freedom of the t family; the sentinel samples Gaussians.
    pub nu: Nu,
    /// AR(1) correlation of the scatter model.
    pub rho: f64,
    /// Scale (mean eigenvalue) of the scatter model.
    pub eta: f64,
    pub replications: usize,
    pub seed: u64,
}

impl ExperimentDesign {
    pub fn validate(&self) -> Result<()> {
        if self.n <= self.p {
            return Err(Error::InvalidDesign {
                reason: format!("n = {} must exceed p = {}", self.n, self.p),
            });
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return Err(Error::InvalidRho { rho: self.rho });
        }
        if self.eta <= 0.0 || !self.eta.is_finite() {
            return Err(Error::InvalidEta { eta: self.eta });
        }
        if self.replications == 0 {
            return Err(Error::InvalidDesign {
                reason: "replications must be at least 1".into(),
            });
        }
        if let Nu::Finite(v) = self.nu {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::InvalidDesign {
                    reason: format!("nu = {v} must be positive"),
                });
            }
        }
        Ok(())
    }

    /// The AR(1) scatter matrix of this design.
    pub fn scatter(&self) -> Result<SpdMatrix> {
        ar1_scatter(self.p, self.rho, self.eta)
    }
}

/// AR(1)-structured scatter: entries eta * rho^|i-j|. Positive definite
/// for every rho in (-1, 1), with mean eigenvalue exactly eta.
pub fn ar1_scatter(p: usize, rho: f64, eta: f64) -> Result<SpdMatrix> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::InvalidRho { rho });
    }
    if eta <= 0.0 || !eta.is_finite() {
        return Err(Error::InvalidEta { eta });
    }
    // rho^k computed once per off-diagonal band
    let mut powers = vec![0.0f64; p];
    let mut acc = eta;
    for pw in powers.iter_mut() {
        *pw = acc;
        acc *= rho;
    }
    let mut m = SquareMatrix::zeros(p);
    for i in 0..p {
        for j in 0..p {
            m.set(i, j, powers[i.abs_diff(j)]);
        }
    }
    SpdMatrix::new(m)
}

/// Independent deterministic substream for one replication.
pub fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// n draws from the t family (or Gaussian for the sentinel) with the
/// given scatter: `x = L z sqrt(nu/q)`, z standard normal, q chi-square
/// with nu degrees of freedom. Bitwise deterministic given
/// `(design.seed, replication)`.
pub fn sample_mvt(
    design: &ExperimentDesign,
    sigma: &SpdMatrix,
    replication: usize,
) -> Result<DataMatrix> {
    design.validate()?;
    if sigma.dim() != design.p {
        return Err(Error::DimensionMismatch {
            expected: design.p,
            got: sigma.dim(),
        });
    }
    let mut rng = replication_rng(design.seed, replication as u64);
    let chi = match design.nu {
        Nu::Finite(v) => Some(ChiSquared::new(v).map_err(|_| Error::InvalidDesign {
            reason: format!("chi-square with nu = {v} is not samplable"),
        })?),
        Nu::Infinite => None,
    };
    let (n, p) = (design.n, design.p);
    let l = sigma.cholesky_lower();
    let mut z = vec![0.0f64; p];
    let mut data = vec![0.0f64; n * p];
    for row in data.chunks_exact_mut(p) {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        let factor = match (&chi, design.nu) {
            (Some(dist), Nu::Finite(v)) => {
                let mut q: f64 = dist.sample(&mut rng);
                while q <= 0.0 {
                    q = dist.sample(&mut rng);
                }
                (v / q).sqrt()
            }
            _ => 1.0,
        };
        lower_tri_matvec(l, p, &z, row);
        for x in row.iter_mut() {
            *x *= factor;
        }
    }
    Ok(DataMatrix::from_raw(n, p, data))
}

/// n elliptical draws `x = r L u` with `u` uniform on the unit sphere and
/// the modular variate r drawn from `radial`. Per sample, the sphere
/// direction is drawn first, then one call to `radial`.
pub fn sample_elliptical<F>(
    design: &ExperimentDesign,
    sigma: &SpdMatrix,
    mut radial: F,
    replication: usize,
) -> Result<DataMatrix>
where
    F: FnMut(&mut ChaCha8Rng) -> f64,
{
    design.validate()?;
    if sigma.dim() != design.p {
        return Err(Error::DimensionMismatch {
            expected: design.p,
            got: sigma.dim(),
        });
    }
    let mut rng = replication_rng(design.seed, replication as u64);
    let (n, p) = (design.n, design.p);
    let l = sigma.cholesky_lower();
    let mut z = vec![0.0f64; p];
    let mut data = vec![0.0f64; n * p];
    for row in data.chunks_exact_mut(p) {
        loop {
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for zi in z.iter_mut() {
                    *zi /= norm;
                }
                break;
            }
        }
        let r = radial(&mut rng);
        lower_tri_matvec(l, p, &z, row);
        for x in row.iter_mut() {
            *x *= r;
        }
    }
    Ok(DataMatrix::from_raw(n, p, data))
}

/// out = L z for a row-major lower-triangular L.
fn lower_tri_matvec(l: &[f64], p: usize, z: &[f64], out: &mut [f64]) {
    for i in 0..p {
        let lrow = &l[i * p..i * p + i + 1];
        out[i] = lrow.iter().zip(&z[..=i]).map(|(a, b)| a * b).sum();
    }
}
