//! Poids, standard deviations and confidence probabilities.
//!
//! The poids `P` of an estimate is the coefficient of the Gaussian
//! `exp(-P u²)` describing its error `u`, so `P = 1/(2σ²)`. For the variable
//! eliminated last it equals `pivot / (2σ_b²)`, where `pivot` is the squared
//! norm of its column projected orthogonally to every other column, i.e.
//! `M[0][0]` of the reverse factorization.

use crate::cholesky::{factor_with, ReverseCholesky, SnapshotPolicy};
use crate::erf::{erf, erfc};
use crate::matrix::NormalSystem;
use crate::{Error, Result};

/// Estimator of the observation noise variance `σ_b²` from the residual sum
/// of squares.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NoiseEstimator {
    /// `rss / s`.
    #[default]
    PerObservation,
    /// `rss / (s - n)`.
    Unbiased,
}

impl NoiseEstimator {
    pub fn sigma_b2(self, rss: f64, s: usize, n: usize) -> Result<f64> {
        if !(rss > 0.0) || !rss.is_finite() {
            return Err(Error::InvalidArgument(
                "residual sum of squares must be positive",
            ));
        }
        if s == 0 {
            return Err(Error::InvalidArgument("observation count must be positive"));
        }
        let dof = match self {
            NoiseEstimator::PerObservation => s,
            NoiseEstimator::Unbiased => {
                if s <= n {
                    return Err(Error::InvalidArgument(
                        "unbiased estimate needs more observations than variables",
                    ));
                }
                s - n
            }
        };
        Ok(rss / dof as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoidsReport {
    /// Zero-based index of the variable in the caller's ordering.
    pub variable: usize,
    pub poids: f64,
    pub log10_poids: f64,
    /// `1 / sqrt(2 · poids)`.
    pub sigma: f64,
    pub sigma_b2_estimate: f64,
}

impl PoidsReport {
    fn from_pivot(variable: usize, pivot: f64, sigma_b2: f64) -> Self {
        let poids = pivot / (2.0 * sigma_b2);
        Self {
            variable,
            poids,
            log10_poids: libm::log10(poids),
            sigma: sigma_from_poids(poids),
            sigma_b2_estimate: sigma_b2,
        }
    }
}

pub fn sigma_from_poids(poids: f64) -> f64 {
    1.0 / libm::sqrt(2.0 * poids)
}

pub fn poids_from_sigma(sigma: f64) -> f64 {
    1.0 / (2.0 * sigma * sigma)
}

/// Poids of the first variable of a completed factorization.
pub fn poids_first(f: &ReverseCholesky, s: usize, rss: f64) -> Result<PoidsReport> {
    poids_first_with(f, s, rss, NoiseEstimator::default())
}

pub fn poids_first_with(
    f: &ReverseCholesky,
    s: usize,
    rss: f64,
    estimator: NoiseEstimator,
) -> Result<PoidsReport> {
    let sigma_b2 = estimator.sigma_b2(rss, s, f.n())?;
    Ok(PoidsReport::from_pivot(0, f.m(0, 0), sigma_b2))
}

/// The coefficient `s‖p_{n-1}‖² / (2‖e'‖²)` in the exponent of the marginal
/// density of the first variable. Identical to the poids.
pub fn marginal_density_coefficient(f: &ReverseCholesky, s: usize, rss: f64) -> Result<f64> {
    poids_first(f, s, rss).map(|r| r.poids)
}

/// Poids of variable `j`: exchange it with the first variable and eliminate
/// everything else. The system must carry `s` and `rss`.
pub fn variance_for_variable(system: &NormalSystem, j: usize) -> Result<PoidsReport> {
    variance_for_variable_with(system, j, NoiseEstimator::default())
}

pub fn variance_for_variable_with(
    system: &NormalSystem,
    j: usize,
    estimator: NoiseEstimator,
) -> Result<PoidsReport> {
    if j >= system.n() {
        return Err(Error::OutOfRange {
            what: "variable index",
            value: j,
            max: system.n() - 1,
        });
    }
    let rss = system.rss().ok_or(Error::InvalidArgument(
        "system has no residual sum of squares",
    ))?;
    let swapped;
    let target = if j == 0 {
        system
    } else {
        swapped = system.swapped(0, j)?;
        &swapped
    };
    let f = factor_with(target, SnapshotPolicy::Never)?;
    let mut report = poids_first_with(&f, system.observations(), rss, estimator)?;
    report.variable = j;
    Ok(report)
}

/// Covariance of the first two variables, `σ_b²` times the inverse of the
/// recorded 2×2 system.
pub fn covariance_block2(f: &ReverseCholesky, s: usize, rss: f64) -> Result<[[f64; 2]; 2]> {
    covariance_block2_with(f, s, rss, NoiseEstimator::default())
}

pub fn covariance_block2_with(
    f: &ReverseCholesky,
    s: usize,
    rss: f64,
    estimator: NoiseEstimator,
) -> Result<[[f64; 2]; 2]> {
    if f.n() < 2 {
        return Err(Error::InvalidArgument("need at least two variables"));
    }
    let snap = f
        .snapshot(2)
        .ok_or(Error::InvalidArgument("the 2×2 system was not recorded"))?;
    let sigma_b2 = estimator.sigma_b2(rss, s, f.n())?;
    let (a, b, c) = (snap.get(0, 0), snap.get(1, 0), snap.get(1, 1));
    let det = a * c - b * b;
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::Singular);
    }
    let k = sigma_b2 / det;
    Ok([[k * c, -k * b], [-k * b, k * a]])
}

/// Probability that an error with poids `poids` lies within `±half_width`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfidenceQuery {
    pub poids: f64,
    pub half_width: f64,
}

impl ConfidenceQuery {
    pub fn new(poids: f64, half_width: f64) -> Result<Self> {
        if !(poids > 0.0) || !poids.is_finite() {
            return Err(Error::InvalidArgument("poids must be positive"));
        }
        if !(half_width >= 0.0) {
            return Err(Error::InvalidArgument("half width must be nonnegative"));
        }
        Ok(Self { poids, half_width })
    }

    pub fn from_log10_poids(log10_poids: f64, half_width: f64) -> Result<Self> {
        Self::new(libm::pow(10.0, log10_poids), half_width)
    }

    fn argument(&self) -> f64 {
        self.half_width * libm::sqrt(self.poids)
    }
}

/// `√(P/π) ∫_{-U}^{U} e^{-P u²} du = erf(U√P)`.
pub fn prob_within(q: &ConfidenceQuery) -> f64 {
    erf(q.argument())
}

/// `1 - prob_within(q)`, computed without cancellation.
pub fn prob_outside(q: &ConfidenceQuery) -> f64 {
    erfc(q.argument())
}

/// Mass of a body as a fraction of the Sun's: `(1 + z) / base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanetMass {
    pub fraction: f64,
    /// `D` in "one part in D".
    pub denominator: f64,
}

pub fn mass_from_correction(z: f64, base: f64) -> Result<PlanetMass> {
    if !(base > 0.0) {
        return Err(Error::InvalidArgument("base must be positive"));
    }
    if !(1.0 + z > 0.0) {
        return Err(Error::InvalidArgument("correction must satisfy 1 + z > 0"));
    }
    Ok(PlanetMass {
        fraction: (1.0 + z) / base,
        denominator: base / (1.0 + z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cholesky::factor;
    use alloc::vec;

    fn bouvard_step_e_printed() -> NormalSystem {
        NormalSystem::new(
            2,
            vec![48442.0, 48020.0, 57725227.0],
            vec![4172.95, -171455.2],
        )
        .unwrap()
        .with_observations(129)
        .with_rss(31096.0)
        .unwrap()
    }

    #[test]
    fn units_cancel() {
        // m(1,1) = s = 2 rss
        let s = NormalSystem::new(1, vec![1.0], vec![1.0]).unwrap();
        let f = factor(&s).unwrap();
        let r = poids_first(&f, 1, 0.5).unwrap();
        assert_eq!(r.poids, 1.0);
        assert_eq!(r.sigma, 1.0 / libm::sqrt(2.0));
        assert_eq!(r.sigma_b2_estimate, 0.5);
        assert_eq!(r.log10_poids, 0.0);
    }

    #[test]
    fn rejects_nonpositive_rss() {
        let s = NormalSystem::identity(1, vec![1.0]).unwrap();
        let f = factor(&s).unwrap();
        assert!(poids_first(&f, 1, 0.0).is_err());
        assert!(poids_first(&f, 0, 1.0).is_err());
        assert!(poids_first_with(&f, 1, 1.0, NoiseEstimator::Unbiased).is_err());
    }

    #[test]
    fn laplace_printed_step_e_poids() {
        let sys = bouvard_step_e_printed();
        let z = variance_for_variable(&sys, 0).unwrap();
        let expect_z = (129.0 / (2.0 * 31096.0)) * (48442.0 - 48020.0_f64 * 48020.0 / 57725227.0);
        assert!((z.poids - expect_z).abs() <= 1e-12 * expect_z);
        assert!((z.log10_poids - 2.0013595).abs() < 0.01);
        let zp = variance_for_variable(&sys, 1).unwrap();
        assert_eq!(zp.variable, 1);
        assert!((zp.log10_poids - 5.0778624).abs() < 0.001);
    }

    #[test]
    fn block_covariance_of_printed_step_e() {
        let sys = bouvard_step_e_printed();
        let f = factor(&sys).unwrap();
        let c = covariance_block2(&f, 129, 31096.0).unwrap();
        let det = 48442.0 * 57725227.0 - 48020.0_f64 * 48020.0;
        let expect = (31096.0 / 129.0) * 48442.0 / det;
        assert!((c[1][1] - expect).abs() <= 1e-14 * expect);
        assert!((libm::sqrt(c[1][1]) - 0.002044).abs() < 1e-6);
    }

    #[test]
    fn block_covariance_of_trivial_snapshots() {
        let f = factor(&NormalSystem::identity(2, vec![0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(
            covariance_block2(&f, 3, 3.0).unwrap(),
            [[1.0, 0.0], [0.0, 1.0]]
        );
        let s = NormalSystem::new(2, vec![2.0, 0.0, 8.0], vec![0.0, 0.0]).unwrap();
        let f = factor(&s).unwrap();
        let c = covariance_block2(&f, 4, 2.0).unwrap();
        assert_eq!(c, [[0.25, 0.0], [0.0, 0.0625]]);
    }

    #[test]
    fn variance_for_first_variable_is_poids_first() {
        let sys = bouvard_step_e_printed();
        let f = factor(&sys).unwrap();
        assert_eq!(
            variance_for_variable(&sys, 0).unwrap(),
            poids_first(&f, 129, 31096.0).unwrap()
        );
        assert_eq!(
            marginal_density_coefficient(&f, 129, 31096.0).unwrap(),
            poids_first(&f, 129, 31096.0).unwrap().poids
        );
    }

    #[test]
    fn variance_needs_rss() {
        let s = NormalSystem::identity(2, vec![0.0, 0.0]).unwrap();
        assert!(variance_for_variable(&s, 0).is_err());
        let s = s.with_observations(2).with_rss(1.0).unwrap();
        assert!(variance_for_variable(&s, 2).is_err());
    }

    #[test]
    fn confidence_edge_cases() {
        let q = ConfidenceQuery::new(3.0, 0.0).unwrap();
        assert_eq!(prob_within(&q), 0.0);
        assert_eq!(prob_outside(&q), 1.0);
        assert!(ConfidenceQuery::new(0.0, 1.0).is_err());
        assert!(ConfidenceQuery::new(1.0, -1.0).is_err());
        let far = ConfidenceQuery::new(7.0, 10.0 / libm::sqrt(7.0)).unwrap();
        assert!(prob_within(&far) >= 1.0 - 1e-12);
    }

    #[test]
    fn laplace_confidence_fractions() {
        let jupiter = ConfidenceQuery::from_log10_poids(5.0778624, 0.01).unwrap();
        let out = prob_outside(&jupiter);
        assert!((0.7e-6..=1.5e-6).contains(&out), "{out}");
        let uranus = ConfidenceQuery::from_log10_poids(2.0013595, 0.25).unwrap();
        assert!((prob_outside(&uranus) * 2509.0 - 1.0).abs() < 0.1);
        let uranus = ConfidenceQuery::from_log10_poids(2.0013595, 0.20).unwrap();
        assert!((prob_outside(&uranus) * 216.6 - 1.0).abs() < 0.05);
    }

    #[test]
    fn masses() {
        let j = mass_from_correction(-0.00305, 1067.09).unwrap();
        assert!((j.denominator - 1070.35).abs() < 0.01);
        let u = mass_from_correction(0.08916, 19504.0).unwrap();
        assert!((u.denominator - 17907.0).abs() < 1.0);
        let z = mass_from_correction(0.0, 19504.0).unwrap();
        assert_eq!(z.fraction, 1.0 / 19504.0);
        assert!(mass_from_correction(-1.0, 10.0).is_err());
        assert!(mass_from_correction(0.0, 0.0).is_err());
    }

    #[test]
    fn sigma_poids_round_trip() {
        for &p in &[1e-3, 0.5, 1.0, 100.3, 1.2e5] {
            let back = poids_from_sigma(sigma_from_poids(p));
            assert!((back - p).abs() <= 1e-14 * p);
        }
    }
}
