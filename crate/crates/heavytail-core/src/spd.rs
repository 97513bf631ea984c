//! Dense symmetric positive-definite matrix primitives.
//!
//! [`SpdMatrix`] carries a validated symmetric positive-definite matrix
//! together with its lower-triangular Cholesky factor. Quadratic forms
//! against the inverse are evaluated by triangular solves on the cached
//! factor, never through an explicit inverse, so a factorization costs
//! O(p^3) once and each quadratic form O(p^2).

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check at construction.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    /// Build from row-major data; `data.len()` must equal `dim * dim`.
    pub fn from_vec(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Mean of the eigenvalues, computed as tr(S)/p.
    pub fn trace_mean(&self) -> f64 {
        self.trace() / self.dim as f64
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| a * v).collect(),
        }
    }

    pub fn add_scaled(&self, other: &Self, a: f64) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x + a * y)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    /// y = M x.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok((0..self.dim).map(|i| dot(self.row(i), x)).collect())
    }

    /// C = A B.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let p = self.dim;
        let mut out = Self::zeros(p);
        for i in 0..p {
            for k in 0..p {
                let a = self.data[i * p + k];
                if a == 0.0 {
                    continue;
                }
                let brow = &other.data[k * p..(k + 1) * p];
                let orow = &mut out.data[i * p..(i + 1) * p];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn transposed(&self) -> Self {
        let p = self.dim;
        let mut out = Self::zeros(p);
        for i in 0..p {
            for j in 0..p {
                out.data[j * p + i] = self.data[i * p + j];
            }
        }
        out
    }
}

/// Relative Frobenius distance ||A - B||_F / ||B||_F.
pub fn rel_frob_diff(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    debug_assert_eq!(a.dim, b.dim);
    let mut num = 0.0;
    for (x, y) in a.data.iter().zip(&b.data) {
        let d = x - y;
        num += d * d;
    }
    num.sqrt() / b.frob_norm()
}

/// Dot product with four independent accumulators. A sequential float sum
/// pins the rounding order and cannot vectorize; this fixed partial-sum
/// tree keeps results deterministic while letting the lanes run in
/// parallel.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let (mut s0, mut s1, mut s2, mut s3) = (0.0f64, 0.0, 0.0, 0.0);
    for (ca, cb) in a.chunks_exact(4).zip(b.chunks_exact(4)) {
        s0 += ca[0] * cb[0];
        s1 += ca[1] * cb[1];
        s2 += ca[2] * cb[2];
        s3 += ca[3] * cb[3];
    }
    let mut s = (s0 + s2) + (s1 + s3);
    for (x, y) in a
        .chunks_exact(4)
        .remainder()
        .iter()
        .zip(b.chunks_exact(4).remainder())
    {
        s += x * y;
    }
    s
}

/// Symmetric positive-definite matrix with its cached Cholesky factor.
///
/// Immutable after construction, so values are freely shareable across
/// threads. Construction symmetrizes the input as (S + S')/2, rejects
/// asymmetry beyond [`SYMMETRY_TOL`], and fails with
/// [`Error::NotPositiveDefinite`] on any nonpositive pivot; no silent
/// regularization is applied.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    mat: SquareMatrix,
    /// Lower-triangular Cholesky factor, row-major, zero above the diagonal.
    factor: Vec<f64>,
}

impl SpdMatrix {
    /// Validate and factor a symmetric positive-definite matrix.
    pub fn new(mat: SquareMatrix) -> Result<Self> {
        let p = mat.dim;
        if p == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let mut max_abs = 0.0f64;
        for v in &mat.data {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "matrix entry",
                });
            }
            max_abs = max_abs.max(v.abs());
        }
        let mut max_asym = 0.0f64;
        for i in 0..p {
            for j in (i + 1)..p {
                max_asym = max_asym.max((mat.get(i, j) - mat.get(j, i)).abs());
            }
        }
        if max_asym > SYMMETRY_TOL * max_abs {
            return Err(Error::NotSymmetric {
                max_asym: max_asym / max_abs,
            });
        }
        // Average out harmless rounding asymmetry before factoring.
        let mut sym = mat;
        for i in 0..p {
            for j in (i + 1)..p {
                let v = 0.5 * (sym.get(i, j) + sym.get(j, i));
                sym.set(i, j, v);
                sym.set(j, i, v);
            }
        }
        let factor = cholesky_lower(&sym)?;
        Ok(Self { mat: sym, factor })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(SquareMatrix::identity(dim)).expect("identity is SPD")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// Mean of the eigenvalues, tr(S)/p.
    pub fn trace_mean(&self) -> f64 {
        self.mat.trace_mean()
    }

    /// Lower-triangular Cholesky factor L with S = L L', row-major.
    pub fn cholesky_lower(&self) -> &[f64] {
        &self.factor
    }

    /// Solve L y = x against the cached factor.
    pub(crate) fn forward_solve_into(&self, x: &[f64], y: &mut [f64]) {
        let p = self.mat.dim;
        for i in 0..p {
            let lrow = &self.factor[i * p..i * p + i];
            let s = dot(lrow, &y[..i]);
            y[i] = (x[i] - s) / self.factor[i * p + i];
        }
    }

    /// x' S^{-1} x via a triangular solve on the cached factor: with
    /// L y = x, the form equals ||y||^2. Nonnegative, and zero iff x = 0.
    pub fn quad_form_inv(&self, x: &[f64]) -> Result<f64> {
        let p = self.mat.dim;
        if x.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; p];
        self.forward_solve_into(x, &mut y);
        Ok(y.iter().map(|v| v * v).sum())
    }

    /// Scale by a > 0 without refactoring: the factor scales by sqrt(a).
    pub fn scaled(&self, a: f64) -> Result<Self> {
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::InvalidEta { eta: a });
        }
        let sa = a.sqrt();
        Ok(Self {
            mat: self.mat.scaled(a),
            factor: self.factor.iter().map(|v| sa * v).collect(),
        })
    }
}

fn cholesky_lower(mat: &SquareMatrix) -> Result<Vec<f64>> {
    let p = mat.dim;
    let mut l = vec![0.0f64; p * p];
    for i in 0..p {
        for j in 0..=i {
            let s = {
                let (ri, rj) = (&l[i * p..i * p + j], &l[j * p..j * p + j]);
                dot(ri, rj)
            };
            let a = mat.get(i, j) - s;
            if i == j {
                if a <= 0.0 || !a.is_finite() {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: a });
                }
                l[i * p + i] = a.sqrt();
            } else {
                l[i * p + j] = a / l[j * p + j];
            }
        }
    }
    Ok(l)
}
