//! Cyclic Jacobi eigenvalues for small symmetric matrices.

use alloc::vec::Vec;

use crate::matrix::{DenseMatrix, NormalSystem};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::DimensionMismatch {
            what: "square matrix",
            expected: n,
            found: m.cols(),
        });
    }
    let mut a: Vec<f64> = m.as_slice().to_vec();
    let at = |a: &[f64], i: usize, j: usize| a[i * n + j];
    let total: f64 = a.iter().map(|v| v * v).sum();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| at(&a, i, j) * at(&a, i, j))
            .sum();
        if off <= f64::EPSILON * f64::EPSILON * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = at(&a, p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (at(&a, q, q) - at(&a, p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                // A ← JᵀAJ on rows/columns p and q
                for k in 0..n {
                    let akp = at(&a, k, p);
                    let akq = at(&a, k, q);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = at(&a, p, k);
                    let aqk = at(&a, q, k);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| at(&a, i, i)).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

/// 2-norm condition number of a symmetric positive definite matrix.
pub fn spd_condition_number(m: &DenseMatrix) -> Result<f64> {
    let eig = symmetric_eigenvalues(m)?;
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    if !(lo > 0.0) {
        return Err(Error::Singular);
    }
    Ok(hi / lo)
}

/// `(κ₂(S), κ₂(D S D))` with `D = diag(1/√S_ii)`.
pub fn condition_numbers(system: &NormalSystem) -> Result<(f64, f64)> {
    let n = system.n();
    let raw = system.to_dense();
    let scale: Vec<f64> = (0..n).map(|i| 1.0 / libm::sqrt(system.get(i, i))).collect();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(if i == j {
                1.0
            } else {
                system.get(i, j) * scale[i] * scale[j]
            });
        }
    }
    let scaled = DenseMatrix::from_parts(n, n, data)?;
    Ok((spd_condition_number(&raw)?, spd_condition_number(&scaled)?))
}
