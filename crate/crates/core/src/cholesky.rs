//! Elimination on the normal equations, last variable first.
//!
//! Each step takes the trailing variable `k` of the current system and
//! removes it from the equations above it by a symmetric rank-1 update of the
//! leading `k × k` triangle. The right-hand side is reduced in the same pass,
//! so the backward solve is done on the fly. No square roots are taken: the
//! row of the triangle that served as pivot row is kept as row `k` of `M`,
//! and
//!
//! ```text
//! AᵀA = (D_M⁻¹ M)ᵀ M,    D_M = diag(M)
//! ```
//!
//! After the last step `M[0][0]` is the squared norm of the first column of
//! `A` projected orthogonally to all the others.

use alloc::vec::Vec;

use crate::matrix::{packed_index, packed_len, DenseMatrix, NormalSystem, Vector};
use crate::rounding::{Arithmetic, Exact};
use crate::{Error, Result};

/// Systems larger than this are not snapshotted unless asked for.
pub const SNAPSHOT_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SnapshotPolicy {
    /// Record when `n <= SNAPSHOT_LIMIT`.
    #[default]
    Auto,
    Always,
    Never,
}

impl SnapshotPolicy {
    fn records(self, n: usize) -> bool {
        match self {
            SnapshotPolicy::Auto => n <= SNAPSHOT_LIMIT,
            SnapshotPolicy::Always => true,
            SnapshotPolicy::Never => false,
        }
    }
}

/// The reduced system over the leading `size` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub size: usize,
    /// Packed lower triangle, row-major.
    pub lower: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl Snapshot {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.lower[packed_index(i, j)]
        } else {
            self.lower[packed_index(j, i)]
        }
    }

    /// Full symmetric matrix (upper triangle mirrored).
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.size;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.get(i, j));
            }
        }
        DenseMatrix::from_parts(n, n, data).expect("snapshot entries are finite")
    }
}

/// Result of [`factor`].
#[derive(Clone, Debug, PartialEq)]
pub struct ReverseCholesky {
    n: usize,
    m: Vec<f64>,
    reduced_rhs: Vector,
    snapshots: Vec<Snapshot>,
}

/// Forward-substituted leading variables; the rest are left unsolved.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    values: Vec<Option<f64>>,
    solved_prefix: usize,
}

impl Solution {
    pub fn solved_prefix(&self) -> usize {
        self.solved_prefix
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<f64> {
        match self.values.get(index) {
            Some(Some(v)) => Ok(*v),
            Some(None) => Err(Error::Unsolved { index }),
            None => Err(Error::OutOfRange {
                what: "variable index",
                value: index,
                max: self.values.len().saturating_sub(1),
            }),
        }
    }

    /// The solved leading values.
    pub fn solved(&self) -> Vec<f64> {
        self.values.iter().map_while(|v| *v).collect()
    }

    /// All entries, `None` where unsolved.
    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }
}

/// Factors with double-precision arithmetic and the default snapshot policy.
pub fn factor(system: &NormalSystem) -> Result<ReverseCholesky> {
    factor_with(system, SnapshotPolicy::Auto)
}

pub fn factor_with(system: &NormalSystem, policy: SnapshotPolicy) -> Result<ReverseCholesky> {
    eliminate(system.n(), system.lower(), system.rhs(), &Exact, policy)
}

/// The elimination kernel, shared by the exact and the rounded replays.
///
/// Step order is `k = n-1, ..., 1`; within a step the triangle is swept row
/// by row in increasing `(i, j)`. The pivot is divided at use, never
/// inverted ahead of time.
pub(crate) fn eliminate<A: Arithmetic>(
    n: usize,
    lower: &[f64],
    rhs: &[f64],
    arith: &A,
    policy: SnapshotPolicy,
) -> Result<ReverseCholesky> {
    debug_assert_eq!(lower.len(), packed_len(n));
    debug_assert_eq!(rhs.len(), n);
    let record = policy.records(n);
    let mut w = lower.to_vec();
    let mut z = rhs.to_vec();
    let mut snapshots = Vec::new();
    if record {
        snapshots.push(Snapshot {
            size: n,
            lower: w.clone(),
            rhs: z.clone(),
        });
    }
    for k in (1..n).rev() {
        eliminate_step(&mut w, &mut z, k, arith)?;
        if record {
            snapshots.push(Snapshot {
                size: k,
                lower: w[..packed_len(k)].to_vec(),
                rhs: z[..k].to_vec(),
            });
        }
    }
    let first = w[0];
    if !(first > 0.0) || !first.is_finite() {
        return Err(Error::NotPositiveDefinite {
            step: 1,
            pivot: first,
        });
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "reduced right-hand side",
        });
    }
    Ok(ReverseCholesky {
        n,
        m: w,
        reduced_rhs: Vector::new(z)?,
        snapshots,
    })
}

/// Removes variable `k` from the leading `k` equations of the packed system.
pub(crate) fn eliminate_step<A: Arithmetic>(
    w: &mut [f64],
    z: &mut [f64],
    k: usize,
    arith: &A,
) -> Result<()> {
    let pivot = w[packed_index(k, k)];
    if !(pivot > 0.0) || !pivot.is_finite() {
        return Err(Error::NotPositiveDefinite { step: k + 1, pivot });
    }
    for i in 0..k {
        let lik = w[packed_index(k, i)];
        for j in 0..=i {
            let ljk = w[packed_index(k, j)];
            let update = arith.div(arith.mul(lik, ljk), pivot);
            let idx = packed_index(i, j);
            w[idx] = arith.sub(w[idx], update);
        }
        z[i] = arith.sub(z[i], arith.div(arith.mul(lik, z[k]), pivot));
    }
    Ok(())
}

impl ReverseCholesky {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)` of `M`, zero above the diagonal.
    pub fn m(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.m[packed_index(i, j)]
        } else {
            0.0
        }
    }

    /// `M` as a packed lower triangle.
    pub fn m_packed(&self) -> &[f64] {
        &self.m
    }

    pub fn m_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..=i {
                out.set(i, j, self.m(i, j));
            }
        }
        out
    }

    /// The diagonal of `M`: successively reduced squared norms.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.m(i, i)).collect()
    }

    pub fn reduced_rhs(&self) -> &Vector {
        &self.reduced_rhs
    }

    /// Recorded systems, largest first (`size = n, n-1, ..., 1`). Empty when
    /// snapshotting was disabled.
    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, size: usize) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.size == size)
    }

    /// `L = D_M^{-1/2} M`, lower triangular with positive diagonal and
    /// `LᵀL = AᵀA`.
    pub fn extract_l(&self) -> DenseMatrix {
        let mut l = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let root = libm::sqrt(self.m(i, i));
            for j in 0..=i {
                l.set(i, j, self.m(i, j) / root);
            }
        }
        l
    }

    /// Forward substitution for the first `k` variables.
    pub fn solve(&self, k: usize) -> Result<Solution> {
        self.solve_with(k, &Exact)
    }

    pub(crate) fn solve_with<A: Arithmetic>(&self, k: usize, arith: &A) -> Result<Solution> {
        if k == 0 || k > self.n {
            return Err(Error::OutOfRange {
                what: "solved variable count",
                value: k,
                max: self.n,
            });
        }
        let mut values: Vec<Option<f64>> = alloc::vec![None; self.n];
        let mut solved = Vec::with_capacity(k);
        for j in 0..k {
            let mut acc = self.reduced_rhs[j];
            for (i, xi) in solved.iter().enumerate() {
                acc = arith.sub(acc, arith.mul(self.m(j, i), *xi));
            }
            let xj = arith.div(acc, self.m(j, j));
            solved.push(xj);
            values[j] = Some(xj);
        }
        Ok(Solution {
            values,
            solved_prefix: k,
        })
    }

    /// The recorded system over the leading `size` variables, symmetrized.
    pub fn subsystem(&self, size: usize) -> Result<(DenseMatrix, Vector)> {
        if size == 0 || size > self.n {
            return Err(Error::OutOfRange {
                what: "subsystem size",
                value: size,
                max: self.n,
            });
        }
        let snap = self.snapshot(size).ok_or(Error::InvalidArgument(
            "snapshots were not recorded for this factorization",
        ))?;
        Ok((snap.to_dense(), Vector::new(snap.rhs.clone())?))
    }
}
