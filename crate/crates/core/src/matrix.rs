//! Dense storage, normal-equation formation and the direct-inversion oracle.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::{Error, Result};

const DEFAULT_LABELS: [&str; 6] = ["p", "q", "r", "t", "γ", "λ"];

fn default_label(j: usize) -> String {
    match DEFAULT_LABELS.get(j) {
        Some(l) => String::from(*l),
        None => format!("c{}", j + 1),
    }
}

/// Index of entry `(i, j)`, `j <= i`, in a row-major packed lower triangle.
#[inline]
pub fn packed_index(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

/// Number of entries in a packed lower triangle of order `n`.
#[inline]
pub fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    labels: Vec<String>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries. Requires `rows >= cols >= 1`
    /// and finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if cols == 0 || rows < cols {
            return Err(Error::InvalidArgument(
                "matrix must satisfy rows >= cols >= 1",
            ));
        }
        Self::from_parts(rows, cols, data)
    }

    /// Like [`DenseMatrix::new`] but without the `rows >= cols` requirement;
    /// used for factors and square blocks.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "matrix" });
        }
        Ok(Self {
            rows,
            cols,
            data,
            labels: (0..cols).map(default_label).collect(),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "row length",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
            labels: (0..n).map(default_label).collect(),
        }
    }

    pub(crate) fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
            labels: (0..cols).map(default_label).collect(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.cols {
            return Err(Error::DimensionMismatch {
                what: "column labels",
                expected: self.cols,
                found: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Returns a copy with the columns reordered: column `k` of the result
    /// is column `perm[k]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.cols)?;
        let mut out = Self::zeros(self.rows, self.cols);
        for (k, &src) in perm.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, k, self.get(i, src));
            }
            out.labels[k] = self.labels[src].clone();
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                what: "vector length",
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok(Vector(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                what: "inner dimension",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0.0;
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            what: "permutation",
            expected: n,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidArgument("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// A vector of finite reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "vector" });
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// Summation rule for the inner products in [`gram_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Summation {
    /// Left to right over the observations.
    #[default]
    Sequential,
    /// Neumaier-compensated, same traversal order.
    Compensated,
}

fn dot(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>, rule: Summation) -> f64 {
    match rule {
        Summation::Sequential => a.zip(b).fold(0.0, |acc, (x, y)| acc + x * y),
        Summation::Compensated => {
            let mut sum = 0.0_f64;
            let mut carry = 0.0_f64;
            for (x, y) in a.zip(b) {
                let term = x * y;
                let t = sum + term;
                if sum.abs() >= term.abs() {
                    carry += (sum - t) + term;
                } else {
                    carry += (term - t) + sum;
                }
                sum = t;
            }
            sum + carry
        }
    }
}

/// Normal equations `AᵀA x = Aᵀb` in packed lower-triangular form.
///
/// `s` is the number of observations the system was formed from and `rss`
/// the residual sum of squares at the least-squares solution, when known.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalSystem {
    n: usize,
    lower: Vec<f64>,
    rhs: Vector,
    s: usize,
    rss: Option<f64>,
}

impl NormalSystem {
    /// `lower` holds the lower triangle row by row: `(0,0), (1,0), (1,1), ...`.
    pub fn new(n: usize, lower: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "system must have at least one variable",
            ));
        }
        if lower.len() != packed_len(n) {
            return Err(Error::DimensionMismatch {
                what: "packed lower triangle",
                expected: packed_len(n),
                found: lower.len(),
            });
        }
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                what: "right-hand side",
                expected: n,
                found: rhs.len(),
            });
        }
        if lower.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "normal matrix",
            });
        }
        if (0..n).any(|i| lower[packed_index(i, i)] <= 0.0) {
            return Err(Error::InvalidArgument(
                "normal matrix diagonal must be strictly positive",
            ));
        }
        Ok(Self {
            n,
            lower,
            rhs: Vector::new(rhs)?,
            s: 0,
            rss: None,
        })
    }

    /// Builds the system from a full symmetric matrix given row by row; only
    /// the lower triangle is read.
    pub fn from_dense(m: &DenseMatrix, rhs: Vec<f64>) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                what: "square matrix",
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let n = m.rows();
        let mut lower = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            for j in 0..=i {
                lower.push(m.get(i, j));
            }
        }
        Self::new(n, lower, rhs)
    }

    pub fn identity(n: usize, rhs: Vec<f64>) -> Result<Self> {
        Self::from_dense(&DenseMatrix::identity(n), rhs)
    }

    pub fn with_observations(mut self, s: usize) -> Self {
        self.s = s;
        self
    }

    pub fn with_rss(mut self, rss: f64) -> Result<Self> {
        if !rss.is_finite() || rss < 0.0 {
            return Err(Error::InvalidArgument(
                "residual sum of squares must be finite and nonnegative",
            ));
        }
        self.rss = Some(rss);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn rhs(&self) -> &Vector {
        &self.rhs
    }

    pub fn observations(&self) -> usize {
        self.s
    }

    pub fn rss(&self) -> Option<f64> {
        self.rss
    }

    /// Entry `(i, j)` of the symmetric matrix, either triangle.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.lower[packed_index(i, j)]
        } else {
            self.lower[packed_index(j, i)]
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Symmetric permutation: variable `k` of the result is variable
    /// `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let mut lower = Vec::with_capacity(self.lower.len());
        for i in 0..self.n {
            for j in 0..=i {
                lower.push(self.get(perm[i], perm[j]));
            }
        }
        let rhs = perm.iter().map(|&p| self.rhs[p]).collect();
        Ok(Self {
            n: self.n,
            lower,
            rhs: Vector(rhs),
            s: self.s,
            rss: self.rss,
        })
    }

    /// Exchanges variables `a` and `b`.
    pub fn swapped(&self, a: usize, b: usize) -> Result<Self> {
        if a >= self.n || b >= self.n {
            return Err(Error::OutOfRange {
                what: "variable index",
                value: a.max(b),
                max: self.n.saturating_sub(1),
            });
        }
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.swap(a, b);
        self.permuted(&perm)
    }

    /// `xᵀ S x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += x[i] * self.get(i, j) * x[j];
            }
        }
        acc
    }
}

/// Forms `AᵀA` and `Aᵀb` with sequential summation.
pub fn gram(a: &DenseMatrix, b: &[f64]) -> Result<NormalSystem> {
    gram_with(a, b, Summation::Sequential)
}

pub fn gram_with(a: &DenseMatrix, b: &[f64], rule: Summation) -> Result<NormalSystem> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            what: "observation vector",
            expected: a.rows(),
            found: b.len(),
        });
    }
    let n = a.cols();
    let s = a.rows();
    let mut lower = Vec::with_capacity(packed_len(n));
    for i in 0..n {
        for j in 0..=i {
            lower.push(dot(
                (0..s).map(|k| a.get(k, i)),
                (0..s).map(|k| a.get(k, j)),
                rule,
            ));
        }
    }
    let rhs = (0..n)
        .map(|i| dot((0..s).map(|k| a.get(k, i)), b.iter().copied(), rule))
        .collect();
    Ok(NormalSystem::new(n, lower, rhs)?.with_observations(s))
}

/// Returns `e' = Ax - b` and `‖e'‖²`.
pub fn residual(a: &DenseMatrix, x: &[f64], b: &[f64]) -> Result<(Vector, f64)> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            what: "observation vector",
            expected: a.rows(),
            found: b.len(),
        });
    }
    let mut e = a.mul_vec(x)?.into_inner();
    for (ei, bi) in e.iter_mut().zip(b) {
        *ei -= bi;
    }
    let e = Vector(e);
    let norm2 = e.norm_squared();
    Ok((e, norm2))
}

/// Inverse of the normal matrix by Gauss-Jordan elimination after symmetric
/// diagonal scaling. This is the reference route the factorizations are
/// checked against; it shares no code with them.
pub fn invert_spd(system: &NormalSystem) -> Result<DenseMatrix> {
    let n = system.n();
    let scale: Vec<f64> = (0..n).map(|i| 1.0 / libm::sqrt(system.get(i, i))).collect();
    // augmented [S | I], row-major, width 2n
    let w = 2 * n;
    let mut aug = vec![0.0; n * w];
    for i in 0..n {
        for j in 0..n {
            aug[i * w + j] = system.get(i, j) * scale[i] * scale[j];
        }
        aug[i * w + n + i] = 1.0;
    }
    for col in 0..n {
        let pivot = aug[col * w + col];
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::Singular);
        }
        for k in 0..w {
            aug[col * w + k] /= pivot;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = aug[row * w + col];
            if factor == 0.0 {
                continue;
            }
            for k in 0..w {
                aug[row * w + k] -= factor * aug[col * w + k];
            }
        }
    }
    let mut inv = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, aug[i * w + n + j] * scale[i] * scale[j]);
        }
    }
    // symmetrize rounding noise
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (inv.get(i, j) + inv.get(j, i));
            inv.set(i, j, v);
            inv.set(j, i, v);
        }
    }
    Ok(inv)
}

/// Solves the normal equations through [`invert_spd`].
pub fn solve_by_inversion(system: &NormalSystem) -> Result<Vector> {
    let inv = invert_spd(system)?;
    inv.mul_vec(system.rhs())
}
