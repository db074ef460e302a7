//! Reverse square-root-free modified Gram-Schmidt.
//!
//! Columns are eliminated last-first: the trailing column is kept, every
//! column before it is projected orthogonally to it, and the procedure
//! repeats on the shortened working matrix. The surviving column at each
//! level is stored in `T`, so that `A = T · unitL` with `TᵀT` diagonal. This
//! is a QL factorization computed without square roots; `L` is recovered by
//! scaling the rows of `unitL` with the column norms of `T`.
//!
//! The variable whose variance is wanted must be ordered first: its column
//! is projected against all others and `dm[0]` becomes the reciprocal of the
//! matching diagonal entry of `(AᵀA)⁻¹`.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{DenseMatrix, Vector};
use crate::{Error, Result};

/// Relative threshold below which a projected column is treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-13;

/// Output of [`reverse_mgs`].
#[derive(Clone, Debug, PartialEq)]
pub struct QLFactors {
    /// Mutually orthogonal columns; column `k` is column `k` of `A`
    /// projected orthogonally to the span of columns `k+1..n`.
    pub t: DenseMatrix,
    /// Squared norms of the columns of `t` (the diagonal of `D_M`).
    pub dm: Vector,
    /// Lower triangular with diagonal `sqrt(dm)`; `LᵀL = AᵀA`.
    pub l: DenseMatrix,
    /// `D_M^{-1/2} L`, unit lower triangular; `A = T · unitL`.
    pub unit_l: DenseMatrix,
}

fn column_dot(m: &DenseMatrix, a: usize, b: usize) -> f64 {
    (0..m.rows()).fold(0.0, |acc, i| acc + m.get(i, a) * m.get(i, b))
}

/// Runs the reverse projection sequence on a working copy of `a`.
pub fn reverse_mgs(a: &DenseMatrix) -> Result<QLFactors> {
    let s = a.rows();
    let n = a.cols();
    let mut work = a.clone();
    let scale = (0..n).map(|j| column_dot(a, j, j)).fold(0.0_f64, f64::max);
    let floor = RANK_TOLERANCE * scale;

    let mut dm = vec![0.0; n];
    let mut unit_l = DenseMatrix::identity(n);
    for k in (0..n).rev() {
        let norm2 = column_dot(&work, k, k);
        if !norm2.is_finite() || norm2 < floor || norm2 == 0.0 {
            return Err(Error::RankDeficient {
                column: k,
                squared_norm: norm2,
            });
        }
        dm[k] = norm2;
        for j in 0..k {
            let coeff = column_dot(&work, k, j) / norm2;
            unit_l.set(k, j, coeff);
            for i in 0..s {
                let v = work.get(i, j) - coeff * work.get(i, k);
                work.set(i, j, v);
            }
        }
    }

    let mut l = DenseMatrix::zeros(n, n);
    for k in 0..n {
        let root = libm::sqrt(dm[k]);
        for j in 0..=k {
            l.set(k, j, root * unit_l.get(k, j));
        }
    }
    let t = work.with_labels(a.labels().to_vec())?;
    Ok(QLFactors {
        t,
        dm: Vector::new(dm)?,
        l,
        unit_l,
    })
}

/// Splits `‖Au‖²` into the part carried by the first `n-1` columns projected
/// orthogonally to the last column and the part along the last column.
///
/// Returns `(‖Au‖², ‖A₁u₁..ₙ₋₁‖², ‖l‖²(uₙ + lᵀA'u₁..ₙ₋₁/‖l‖²)²)`; the first
/// equals the sum of the other two.
pub fn pythagorean_decomposition_check(a: &DenseMatrix, u: &[f64]) -> Result<(f64, f64, f64)> {
    let n = a.cols();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            what: "error vector",
            expected: n,
            found: u.len(),
        });
    }
    let s = a.rows();
    let last = n - 1;
    let total = a.mul_vec(u)?.norm_squared();

    let l_norm2 = column_dot(a, last, last);
    if !(l_norm2 > 0.0) {
        return Err(Error::RankDeficient {
            column: last,
            squared_norm: l_norm2,
        });
    }
    // A' u' and its component along l
    let head: Vec<f64> = (0..s)
        .map(|i| (0..last).map(|j| a.get(i, j) * u[j]).sum())
        .collect();
    let along = (0..s).map(|i| a.get(i, last) * head[i]).sum::<f64>() / l_norm2;
    let projected = (0..s)
        .map(|i| {
            let v = head[i] - along * a.get(i, last);
            v * v
        })
        .sum();
    let coeff = u[last] + along;
    Ok((total, projected, l_norm2 * coeff * coeff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn hand_two_by_two() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let f = reverse_mgs(&a).unwrap();
        assert_close(f.t.get(0, 0), 0.5);
        assert_close(f.t.get(1, 0), -0.5);
        assert_eq!(f.t.column(1), [1.0, 1.0]);
        assert_close(f.dm[0], 0.5);
        assert_close(f.dm[1], 2.0);
        assert_close(f.l.get(0, 0), 1.0 / SQRT_2);
        assert_close(f.l.get(0, 1), 0.0);
        assert_close(f.l.get(1, 0), 1.0 / SQRT_2);
        assert_close(f.l.get(1, 1), SQRT_2);
        assert_close(f.unit_l.get(1, 0), 0.5);
    }

    #[test]
    fn orthogonal_columns_are_left_alone() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 3.0], [0.0, 0.0]]).unwrap();
        let f = reverse_mgs(&a).unwrap();
        assert_eq!(f.t.as_slice(), a.as_slice());
        assert_eq!(f.unit_l, DenseMatrix::identity(2));
        assert_eq!(&f.dm[..], &[1.0, 9.0]);
    }

    #[test]
    fn single_column() {
        let a = DenseMatrix::from_rows(&[[3.0], [4.0]]).unwrap();
        let f = reverse_mgs(&a).unwrap();
        assert_eq!(f.t.as_slice(), a.as_slice());
        assert_eq!(f.l.get(0, 0), 5.0);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]).unwrap();
        assert!(matches!(
            reverse_mgs(&a),
            Err(Error::RankDeficient { column: 0, .. })
        ));
    }

    #[test]
    fn pythagoras_on_last_basis_vector() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        let (total, head, last) = pythagorean_decomposition_check(&a, &[0.0, 1.0]).unwrap();
        assert_eq!(total, 56.0);
        assert_eq!(head, 0.0);
        assert_eq!(last, 56.0);
    }

    #[test]
    fn pythagoras_with_vanishing_last_term() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        // u_n = -lᵀp u_1 / ‖l‖²
        let u1 = 1.5;
        let un = -(2.0 + 12.0 + 30.0) * u1 / 56.0;
        let (total, head, last) = pythagorean_decomposition_check(&a, &[u1, un]).unwrap();
        assert!(last < 1e-28);
        assert_close(total, head);
    }
}
