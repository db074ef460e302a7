#![allow(dead_code)]

use laplace_core::inference::covariance_block2;
use laplace_core::mgs::pythagorean_decomposition_check;
use laplace_core::{gram, residual, reverse_mgs, DenseMatrix, NormalSystem, SnapshotPolicy};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// A random regression problem with more observations than variables.
#[derive(Clone, Debug)]
pub struct Problem {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub u: Vec<f64>,
}

impl Problem {
    pub fn s(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Normal equations with `s` and the least-squares residual attached.
    pub fn system(&self) -> NormalSystem {
        let sys = gram(&self.a, &self.b).unwrap();
        let x = to_vec(&oracle_solve(&sys));
        let (_, rss) = residual(&self.a, &x, &self.b).unwrap();
        sys.with_rss(rss).unwrap()
    }
}

pub fn to_nalgebra(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn to_vec(v: &nalgebra::DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

/// `(AᵀA)⁻¹` through nalgebra's Cholesky.
pub fn oracle_inverse(sys: &NormalSystem) -> DMatrix<f64> {
    to_nalgebra(&sys.to_dense())
        .cholesky()
        .expect("spd")
        .inverse()
}

pub fn oracle_solve(sys: &NormalSystem) -> nalgebra::DVector<f64> {
    let rhs = nalgebra::DVector::from_column_slice(sys.rhs());
    to_nalgebra(&sys.to_dense())
        .cholesky()
        .expect("spd")
        .solve(&rhs)
}

pub fn oracle_condition(sys: &NormalSystem) -> f64 {
    let eig = to_nalgebra(&sys.to_dense()).symmetric_eigenvalues();
    eig.max() / eig.min()
}

/// Random `A` with `s ≤ 20`, `n ≤ 8`, `s > n`, entries in `[-1, 1]`,
/// rejecting the rare draws whose normal matrix is badly conditioned.
pub fn problem() -> impl Strategy<Value = Problem> {
    (1usize..=8)
        .prop_flat_map(|n| ((n + 1)..=20).prop_map(move |s| (s, n)))
        .prop_flat_map(|(s, n)| {
            (
                prop::collection::vec(-1.0..1.0f64, s * n),
                prop::collection::vec(-1.0..1.0f64, s),
                prop::collection::vec(-1.0..1.0f64, n),
            )
                .prop_map(move |(data, b, u)| Problem {
                    a: DenseMatrix::new(s, n, data).unwrap(),
                    b,
                    u,
                })
        })
        .prop_filter("well conditioned", |p| {
            let sys = gram(&p.a, &p.b).unwrap();
            to_nalgebra(&sys.to_dense()).cholesky().is_some() && oracle_condition(&sys) < 1e6
        })
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, x| m.max(x.abs()))
}

/// Errors of the property-suite identities for one problem, each already
/// normalized so that it is compared against its tolerance directly.
#[derive(Clone, Copy, Debug, Default)]
pub struct Identities {
    /// (a) max |L_mgs − L_chol| / max |L|.
    pub l_agreement: f64,
    /// (b) max |tᵢ·tⱼ| / (‖tᵢ‖‖tⱼ‖) over i ≠ j.
    pub orthogonality: f64,
    /// (c) max |A − T unitL| / max |A|.
    pub reconstruction: f64,
    /// (d) |m₁₁ · (AᵀA)⁻¹₁₁ − 1|.
    pub leading_pivot: f64,
    /// (e) |total − projected − last| / total.
    pub pythagoras: f64,
    /// (f) max |block − σ_b² (AᵀA)⁻¹[0..2, 0..2]| / max |σ_b² (AᵀA)⁻¹[0..2, 0..2]|; zero for n = 1.
    pub covariance_block: f64,
    /// (g) largest relative increase of the leading pivot from one step to the next.
    pub pivot_increase: f64,
}

pub fn identities(p: &Problem) -> Identities {
    let n = p.n();
    let sys = p.system();
    let ql = reverse_mgs(&p.a).unwrap();
    let f = laplace_core::cholesky::factor_with(&sys, SnapshotPolicy::Always).unwrap();
    let l_chol = f.extract_l();
    let l_scale = max_abs(ql.l.as_slice().iter().copied());
    let l_agreement = max_abs(
        ql.l.as_slice()
            .iter()
            .zip(l_chol.as_slice())
            .map(|(x, y)| x - y),
    ) / l_scale;

    let t = to_nalgebra(&ql.t);
    let ttt = t.transpose() * &t;
    let mut orthogonality: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let r = ttt[(i, j)].abs() / (ttt[(i, i)] * ttt[(j, j)]).sqrt();
                orthogonality = orthogonality.max(r);
            }
        }
    }

    let rebuilt = t * to_nalgebra(&ql.unit_l);
    let a = to_nalgebra(&p.a);
    let reconstruction = (a.clone() - rebuilt).abs().max() / a.abs().max();

    let inv = oracle_inverse(&sys);
    let leading_pivot = (f.m(0, 0) * inv[(0, 0)] - 1.0).abs();

    let (total, projected, last) = pythagorean_decomposition_check(&p.a, &p.u).unwrap();
    let pythagoras = (total - projected - last).abs() / total.max(f64::MIN_POSITIVE);

    let covariance_block = if n >= 2 {
        let s = sys.observations();
        let rss = sys.rss().unwrap();
        let block = covariance_block2(&f, s, rss).unwrap();
        let k = rss / s as f64;
        let want = [
            [k * inv[(0, 0)], k * inv[(0, 1)]],
            [k * inv[(1, 0)], k * inv[(1, 1)]],
        ];
        let scale = max_abs(want.iter().flatten().copied());
        let mut err: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                err = err.max((block[i][j] - want[i][j]).abs());
            }
        }
        err / scale
    } else {
        0.0
    };

    let leading: Vec<f64> = f.snapshots().iter().map(|s| s.get(0, 0)).collect();
    let pivot_increase = leading
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);

    Identities {
        l_agreement,
        orthogonality,
        reconstruction,
        leading_pivot,
        pythagoras,
        covariance_block,
        pivot_increase,
    }
}
