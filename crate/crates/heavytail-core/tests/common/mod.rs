//! Slow independent oracles shared by the integration tests: Jacobi
//! eigenvalues, Gauss-Jordan inverse, seeded random matrices with bounded
//! condition numbers, and a chi-square CDF for distributional checks.
//! Nothing here touches the library's own factorization or solve paths.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use heavytail_core::{replication_rng, SquareMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    replication_rng(seed, 0)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &SquareMatrix) -> Vec<f64> {
    let p = m.dim();
    let mut a: Vec<Vec<f64>> = (0..p).map(|i| m.row(i).to_vec()).collect();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..p {
            for j in (i + 1)..p {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frob(&a)) {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                if a[i][j].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[j][j] - a[i][i]) / (2.0 * a[i][j]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let (aki, akj) = (a[k][i], a[k][j]);
                    a[k][i] = c * aki - s * akj;
                    a[k][j] = s * aki + c * akj;
                }
                for k in 0..p {
                    let (aik, ajk) = (a[i][k], a[j][k]);
                    a[i][k] = c * aik - s * ajk;
                    a[j][k] = s * aik + c * ajk;
                }
            }
        }
    }
    (0..p).map(|i| a[i][i]).collect()
}

fn frob(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

/// Dense inverse by Gauss-Jordan elimination with partial pivoting.
pub fn dense_inverse(m: &SquareMatrix) -> SquareMatrix {
    let p = m.dim();
    let mut a: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            let mut id = vec![0.0; p];
            id[i] = 1.0;
            row.extend(id);
            row
        })
        .collect();
    for col in 0..p {
        let pivot_row = (col..p)
            .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot_row);
        let pivot = a[col][col];
        assert!(pivot.abs() > 1e-300, "singular matrix in oracle inverse");
        for v in a[col].iter_mut() {
            *v /= pivot;
        }
        for row in 0..p {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            if factor == 0.0 {
                continue;
            }
            for k in 0..2 * p {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    let mut out = SquareMatrix::zeros(p);
    for i in 0..p {
        for j in 0..p {
            out.set(i, j, a[i][p + j]);
        }
    }
    out
}

/// Random orthogonal matrix from Gram-Schmidt on a Gaussian draw.
pub fn random_orthogonal(p: usize, rng: &mut ChaCha8Rng) -> SquareMatrix {
    loop {
        let mut cols: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..p).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let mut ok = true;
        for j in 0..p {
            for k in 0..j {
                let proj: f64 = (0..p).map(|i| cols[j][i] * cols[k][i]).sum();
                for i in 0..p {
                    cols[j][i] -= proj * cols[k][i];
                }
            }
            let norm: f64 = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for v in cols[j].iter_mut() {
                *v /= norm;
            }
        }
        if ok {
            let mut q = SquareMatrix::zeros(p);
            for i in 0..p {
                for j in 0..p {
                    q.set(i, j, cols[j][i]);
                }
            }
            return q;
        }
    }
}

/// Random invertible matrix Q1 D Q2 with singular values log-spaced so the
/// condition number is exactly `cond`.
pub fn random_invertible(p: usize, cond: f64, rng: &mut ChaCha8Rng) -> SquareMatrix {
    let q1 = random_orthogonal(p, rng);
    let q2 = random_orthogonal(p, rng);
    let mut d = SquareMatrix::zeros(p);
    for i in 0..p {
        let frac = if p == 1 {
            0.0
        } else {
            i as f64 / (p - 1) as f64
        };
        d.set(i, i, cond.powf(-0.5 + frac));
    }
    q1.matmul(&d).unwrap().matmul(&q2).unwrap()
}

/// Random symmetric positive-definite matrix with the given condition
/// number.
pub fn random_spd(p: usize, cond: f64, rng: &mut ChaCha8Rng) -> SquareMatrix {
    let q = random_orthogonal(p, rng);
    let mut d = SquareMatrix::zeros(p);
    for i in 0..p {
        let frac = if p == 1 {
            0.0
        } else {
            i as f64 / (p - 1) as f64
        };
        d.set(i, i, cond.powf(-0.5 + frac));
    }
    let qd = q.matmul(&d).unwrap();
    qd.matmul(&q.transposed()).unwrap()
}

// ---- chi-square CDF (regularized lower incomplete gamma) ----

fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.9999999999998099,
        676.5203681218851,
        -1259.1392167224028,
        771.3234287776531,
        -176.6150291621406,
        12.507343278686905,
        -0.13857109526572012,
        9.984369578019572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + 7.5;
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_contfrac(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_contfrac(a, x)
    }
}

/// CDF of the chi-square distribution with k degrees of freedom.
pub fn chi2_cdf(k: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_p(k / 2.0, x / 2.0)
    }
}

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
pub fn ks_statistic(values: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len() as f64;
    let mut d = 0.0f64;
    for (i, v) in values.iter().enumerate() {
        let f = cdf(*v);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Asymptotic KS critical value at significance alpha.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}
