//! Distribution-free shape-matrix M-estimation.
//!
//! The estimator is the fixed point of
//!
//! ```text
//! S = (1/n) sum_i (p / x_i' S^{-1} x_i) x_i x_i'
//! ```
//!
//! solved by plain fixed-point iteration from the identity, renormalizing
//! every iterate to trace p so the convergence test is scale-free. The
//! solution identifies the shape matrix (scatter up to scale) only; the
//! per-sample weights `w_i = p / x_i' S^{-1} x_i` are what downstream
//! scale recovery consumes.
//!
//! `fit_tyler` is a pure function of its inputs and runs single-threaded;
//! callers parallelize across independent fits, which keeps every result
//! bitwise independent of scheduling.

use crate::error::{Error, Result};
use crate::spd::{rel_frob_diff, SpdMatrix, SquareMatrix};

/// Rows below this Euclidean norm are rejected at ingestion rather than
/// silently dropped, which would bias the effective sample count.
pub const MIN_ROW_NORM: f64 = 1e-150;

/// Quadratic forms below this floor abort the iteration as singular.
const MIN_QUAD_FORM: f64 = 1e-300;

/// Centered observations, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl DataMatrix {
    /// Validate and take ownership of row-major samples: all entries
    /// finite, no (near-)zero rows, at least one row and one column.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DegenerateData {
                reason: "no rows".into(),
            });
        }
        let p = rows[0].len();
        if p == 0 {
            return Err(Error::DegenerateData {
                reason: "empty rows".into(),
            });
        }
        let mut data = Vec::with_capacity(n * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: row.len(),
                });
            }
            let mut sq = 0.0;
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::DegenerateData {
                        reason: format!("non-finite entry in row {i}"),
                    });
                }
                sq += v * v;
            }
            if sq.sqrt() < MIN_ROW_NORM {
                return Err(Error::DegenerateData {
                    reason: format!("row {i} is (near-)zero"),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, p, data })
    }

    pub(crate) fn from_raw(n: usize, p: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * p);
        Self { n, p, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p)
    }

    /// Samples mapped through an invertible matrix: x_i -> A x_i.
    pub fn transformed(&self, a: &SquareMatrix) -> Result<DataMatrix> {
        if a.dim() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: a.dim(),
            });
        }
        let rows: Vec<Vec<f64>> = self.rows().map(|x| a.matvec(x)).collect::<Result<_>>()?;
        DataMatrix::from_rows(&rows)
    }

    /// Every sample rescaled by a nonzero constant.
    pub fn scaled(&self, c: f64) -> Result<DataMatrix> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::NonFinite {
                context: "scale factor",
            });
        }
        Ok(Self {
            n: self.n,
            p: self.p,
            data: self.data.iter().map(|v| c * v).collect(),
        })
    }
}

/// Converged shape-matrix fit.
#[derive(Debug, Clone)]
pub struct TylerFit {
    shape: SpdMatrix,
    weights: Vec<f64>,
    iterations: usize,
    residual: f64,
    residual_history: Vec<f64>,
}

impl TylerFit {
    /// Shape matrix with trace p.
    pub fn shape(&self) -> &SpdMatrix {
        &self.shape
    }

    /// Per-sample weights w_i = p / x_i' S^{-1} x_i at the fixed point.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Relative Frobenius change of the last accepted iterate.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Relative change per iteration, in order.
    pub fn residual_history(&self) -> &[f64] {
        &self.residual_history
    }
}

/// Iteration controls for the fixed-point solve.
#[derive(Debug, Clone, Copy)]
pub struct TylerOptions {
    /// Relative Frobenius change between successive normalized iterates.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for TylerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

/// One application of the map: (1/n) sum_i (p / x_i' S^{-1} x_i) x_i x_i',
/// without trace normalization.
pub fn tyler_map(shape: &SpdMatrix, data: &DataMatrix) -> Result<SpdMatrix> {
    if shape.dim() != data.p {
        return Err(Error::DimensionMismatch {
            expected: data.p,
            got: shape.dim(),
        });
    }
    let acc = weighted_outer_sum(shape, data)?;
    SpdMatrix::new(acc)
}

/// Accumulate (1/n) sum_i (p / q_i) x_i x_i' with q_i the inverse quadratic
/// form against `shape`. Upper triangle built once, mirrored at the end.
fn weighted_outer_sum(shape: &SpdMatrix, data: &DataMatrix) -> Result<SquareMatrix> {
    let p = data.p;
    let n = data.n;
    let mut acc = vec![0.0f64; p * p];
    let mut y = vec![0.0f64; p];
    let pf = p as f64;
    for (i, x) in data.rows().enumerate() {
        shape.forward_solve_into(x, &mut y);
        let q: f64 = y.iter().map(|v| v * v).sum();
        if !q.is_finite() || q <= MIN_QUAD_FORM {
            return Err(Error::SingularIterate { index: i, value: q });
        }
        let w = pf / q;
        for r in 0..p {
            let xr_w = w * x[r];
            let row = &mut acc[r * p + r..(r + 1) * p];
            let xs = &x[r..];
            for (dst, &xv) in row.iter_mut().zip(xs) {
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
    SquareMatrix::from_vec(p, acc)
}

/// Solve the shape fixed point from the identity start.
///
/// The iterate is renormalized to trace p after every map application and
/// the stopping rule is the relative Frobenius change between successive
/// normalized iterates. Requires n > p; fails with `NotConverged`
/// (carrying the final residual) when the cap is hit.
pub fn fit_tyler(data: &DataMatrix, opts: &TylerOptions) -> Result<TylerFit> {
    let (n, p) = (data.n, data.p);
    if n <= p {
        return Err(Error::DegenerateData {
            reason: format!("n = {n} samples but dimension p = {p}; need n > p"),
        });
    }
    let pf = p as f64;
    let mut shape = SpdMatrix::identity(p);
    let mut residual = f64::INFINITY;
    let mut residual_history = Vec::new();
    for iter in 1..=opts.max_iter {
        let mapped = weighted_outer_sum(&shape, data)?;
        let next = SpdMatrix::new(mapped.scaled(pf / mapped.trace()))?;
        residual = rel_frob_diff(next.matrix(), shape.matrix());
        residual_history.push(residual);
        shape = next;
        if residual < opts.tol {
            let weights = tyler_weights(&shape, data)?;
            return Ok(TylerFit {
                shape,
                weights,
                iterations: iter,
                residual,
                residual_history,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual,
        last_nu: None,
    })
}

fn tyler_weights(shape: &SpdMatrix, data: &DataMatrix) -> Result<Vec<f64>> {
    let pf = data.p as f64;
    let mut y = vec![0.0f64; data.p];
    let mut weights = Vec::with_capacity(data.n);
    for (i, x) in data.rows().enumerate() {
        shape.forward_solve_into(x, &mut y);
        let q: f64 = y.iter().map(|v| v * v).sum();
        if !q.is_finite() || q <= MIN_QUAD_FORM {
            return Err(Error::SingularIterate { index: i, value: q });
        }
        weights.push(pf / q);
    }
    Ok(weights)
}
