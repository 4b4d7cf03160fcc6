//! Multivariate and univariate Gaussian densities, sampling, and the
//! standard-normal CDF.
//!
//! Densities are evaluated in the log domain throughout: the quadratic term
//! grows with squared Mahalanobis distance, so raw exponentials underflow at
//! moderate separations while log-densities stay exact. Anything that needs
//! a probability exponentiates at the very end.

use serde::{Deserialize, Serialize};

use crate::linalg::{CholeskyFactor, SymMatrix};
use crate::rng::SplitMix64;
use crate::{Error, Result};

pub(crate) const LN_2PI: f64 = 1.8378770664093453;

/// A multivariate Gaussian `N(μ, Σ)` with its solver state precomputed.
///
/// Construction factors the covariance once; the Cholesky factor, inverse
/// and log-determinant are cached so density evaluation and sampling are a
/// few dot products. A covariance that is not positive definite is rejected
/// at construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GaussianRepr", into = "GaussianRepr")]
pub struct GaussianParams {
    mean: Vec<f64>,
    cov: SymMatrix,
    chol: CholeskyFactor,
    inverse: SymMatrix,
    log_det: f64,
}

/// Serialized form: mean and covariance only; caches are rebuilt on load so
/// a round trip reproduces the exact same evaluation path.
#[derive(Serialize, Deserialize)]
struct GaussianRepr {
    mean: Vec<f64>,
    cov: SymMatrix,
}

impl TryFrom<GaussianRepr> for GaussianParams {
    type Error = Error;

    fn try_from(repr: GaussianRepr) -> Result<Self> {
        GaussianParams::new(repr.mean, repr.cov)
    }
}

impl From<GaussianParams> for GaussianRepr {
    fn from(p: GaussianParams) -> Self {
        GaussianRepr {
            mean: p.mean,
            cov: p.cov,
        }
    }
}

impl GaussianParams {
    pub fn new(mean: Vec<f64>, cov: SymMatrix) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: cov.dim(),
                actual: mean.len(),
            });
        }
        let chol = cov.cholesky()?;
        let inverse = chol.inverse();
        let log_det = chol.log_det();
        Ok(Self {
            mean,
            cov,
            chol,
            inverse,
            log_det,
        })
    }

    /// Univariate convenience constructor.
    pub fn univariate(mean: f64, variance: f64) -> Result<Self> {
        Self::new(vec![mean], SymMatrix::from_diagonal(&[variance]))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &SymMatrix {
        &self.cov
    }

    pub fn inverse(&self) -> &SymMatrix {
        &self.inverse
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    pub fn cholesky(&self) -> &CholeskyFactor {
        &self.chol
    }

    /// Squared Mahalanobis distance `(x−μ)ᵀ Σ⁻¹ (x−μ)`.
    pub fn mahalanobis_sq(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let diff: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        Ok(self.inverse.quad_form(&diff))
    }

    /// Log-density `−(d/2)ln(2π) − ½ln|Σ| − ½(x−μ)ᵀΣ⁻¹(x−μ)`.
    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        let mahal = self.mahalanobis_sq(x)?;
        Ok(-0.5 * (self.dim() as f64 * LN_2PI + self.log_det + mahal))
    }

    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        Ok(self.log_pdf(x)?.exp())
    }

    /// Draws `count` vectors `μ + L z` with `z` i.i.d. standard normal.
    /// Deterministic for a fixed generator state.
    pub fn sample(&self, count: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| {
                let z: Vec<f64> = (0..self.dim()).map(|_| rng.next_standard_normal()).collect();
                let colored = self.chol.mul_vec(&z);
                colored
                    .iter()
                    .zip(&self.mean)
                    .map(|(c, m)| c + m)
                    .collect()
            })
            .collect()
    }
}

/// Standard-normal CDF `Φ(z)`.
///
/// Rational-polynomial approximation of the complementary tail (Hart-style
/// coefficients as tabulated by West), switching to a continued-fraction
/// form past `|z| ≈ 7.07`. Absolute error is far below the 1e-7 this crate
/// relies on, and `Φ(0) = 0.5` holds exactly.
pub fn std_normal_cdf(z: f64) -> f64 {
    let x = z.abs();
    let upper_tail = if x > 37.0 {
        0.0
    } else {
        let e = (-0.5 * x * x).exp();
        if x < 7.071_067_811_865_475 {
            let mut num = 3.526_249_659_989_11e-2;
            for c in [
                0.700_383_064_443_688,
                6.373_962_203_531_65,
                33.912_866_078_383,
                112.079_291_497_871,
                221.213_596_169_931,
                220.206_867_912_376,
            ] {
                num = num * x + c;
            }
            let mut den = 8.838_834_764_831_84e-2;
            for c in [
                1.755_667_163_182_64,
                16.064_177_579_207,
                86.780_732_202_946_1,
                296.564_248_779_674,
                637.333_633_378_831,
                793.826_512_519_948,
                440.413_735_824_752,
            ] {
                den = den * x + c;
            }
            e * num / den
        } else {
            let mut build = x + 0.65;
            build = x + 4.0 / build;
            build = x + 3.0 / build;
            build = x + 2.0 / build;
            build = x + 1.0 / build;
            e / build / 2.506_628_274_631_000_5
        }
    };
    if z > 0.0 {
        1.0 - upper_tail
    } else {
        upper_tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent CDF oracle: composite Simpson integration of the
    /// standard-normal density from 0 to z (symmetry handles the rest).
    /// Never touches the rational approximation.
    pub(crate) fn cdf_by_integration(z: f64) -> f64 {
        let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let (a, b) = (0.0, z.abs().min(12.0));
        let steps = 4000;
        let h = (b - a) / steps as f64;
        let mut acc = density(a) + density(b);
        for i in 1..steps {
            let t = a + i as f64 * h;
            acc += density(t) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let half = acc * h / 3.0;
        if z >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    #[test]
    fn cdf_at_zero_is_exactly_half() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
    }

    #[test]
    fn cdf_tail_limits() {
        assert!(std_normal_cdf(8.0) >= 1.0 - 1e-15);
        assert!(std_normal_cdf(-8.0) <= 1e-15);
        assert_eq!(std_normal_cdf(40.0), 1.0);
        assert_eq!(std_normal_cdf(-40.0), 0.0);
    }

    #[test]
    fn cdf_at_one_matches_integration_oracle() {
        let phi1 = std_normal_cdf(1.0);
        assert!((phi1 - 0.8413447460685429).abs() <= 1e-9);
        assert!((phi1 - cdf_by_integration(1.0)).abs() <= 1e-7);
    }

    #[test]
    fn cdf_matches_integration_oracle_on_grid() {
        for i in 0..=1000 {
            let z = -10.0 + i as f64 * 0.02;
            let err = (std_normal_cdf(z) - cdf_by_integration(z)).abs();
            assert!(err <= 1e-7, "z = {z}, err = {err}");
        }
    }

    #[test]
    fn cdf_symmetry_and_monotonicity() {
        let mut prev = 0.0;
        for i in 0..=800 {
            let z = -8.0 + i as f64 * 0.02;
            let p = std_normal_cdf(z);
            assert!(p >= prev, "not monotone at z = {z}");
            prev = p;
            assert!((std_normal_cdf(-z) - (1.0 - p)).abs() <= 1e-12);
        }
    }

    #[test]
    fn cdf_differences_match_density_integrals() {
        // Φ(b) − Φ(a) against Simpson integration of the density on [a, b].
        let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        for (a, b) in [(-1.5, 0.3), (0.2, 2.4), (-3.0, -1.0)] {
            let steps = 2000;
            let h = (b - a) / steps as f64;
            let mut acc = density(a) + density(b);
            for i in 1..steps {
                acc += density(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let integral = acc * h / 3.0;
            let diff = std_normal_cdf(b) - std_normal_cdf(a);
            assert!((diff - integral).abs() <= 1e-6);
        }
    }

    #[test]
    fn log_pdf_at_mean_of_standard_bivariate() {
        let p = GaussianParams::new(vec![0.0, 0.0], SymMatrix::identity(2)).unwrap();
        let pdf = p.pdf(&[0.0, 0.0]).unwrap();
        assert!((pdf - 1.0 / (2.0 * std::f64::consts::PI)).abs() <= 1e-12);
    }

    #[test]
    fn log_pdf_univariate_standard_normal() {
        let p = GaussianParams::univariate(0.0, 1.0).unwrap();
        let pdf = p.pdf(&[1.0]).unwrap();
        assert!((pdf - 0.24197072451914337).abs() <= 1e-12);
    }

    #[test]
    fn log_pdf_dense_covariance_at_mean() {
        // |Σ| = 49 by the cofactor formula, so the peak density is 1/(2π·7).
        let cov = SymMatrix::from_rows(&[vec![10.0, 1.0], vec![1.0, 5.0]]).unwrap();
        let p = GaussianParams::new(vec![-4.0, 4.0], cov).unwrap();
        let pdf = p.pdf(&[-4.0, 4.0]).unwrap();
        assert!((pdf - 1.0 / (2.0 * std::f64::consts::PI * 7.0)).abs() <= 1e-12);
    }

    #[test]
    fn log_pdf_maximized_at_mean() {
        let cov = SymMatrix::from_rows(&[vec![2.0, 0.4], vec![0.4, 1.0]]).unwrap();
        let p = GaussianParams::new(vec![1.0, -2.0], cov).unwrap();
        let at_mean = p.log_pdf(&[1.0, -2.0]).unwrap();
        let mut rng = SplitMix64::new(3);
        for _ in 0..200 {
            let x = [
                1.0 + 4.0 * (rng.next_f64() - 0.5),
                -2.0 + 4.0 * (rng.next_f64() - 0.5),
            ];
            assert!(p.log_pdf(&x).unwrap() <= at_mean);
        }
    }

    #[test]
    fn log_pdf_rejects_dimension_mismatch() {
        let p = GaussianParams::new(vec![0.0, 0.0], SymMatrix::identity(2)).unwrap();
        assert!(matches!(
            p.log_pdf(&[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn construction_rejects_singular_covariance() {
        let singular = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            GaussianParams::new(vec![0.0, 0.0], singular),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn one_dimensional_density_integrates_to_one() {
        let p = GaussianParams::univariate(0.7, 2.3).unwrap();
        let sigma = 2.3f64.sqrt();
        let (a, b) = (0.7 - 10.0 * sigma, 0.7 + 10.0 * sigma);
        let steps = 20_000;
        let h = (b - a) / steps as f64;
        let f = |x: f64| p.pdf(&[x]).unwrap();
        let mut acc = f(a) + f(b);
        for i in 1..steps {
            acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = acc * h / 3.0;
        assert!((integral - 1.0).abs() <= 1e-6, "integral = {integral}");
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let p = GaussianParams::new(vec![1.0, 2.0], SymMatrix::identity(2)).unwrap();
        let a = p.sample(1, &mut SplitMix64::new(99));
        let b = p.sample(1, &mut SplitMix64::new(99));
        assert_eq!(a, b);
    }

    #[test]
    fn sample_mean_converges() {
        let p = GaussianParams::new(vec![-1.0, 3.0], SymMatrix::identity(2)).unwrap();
        let mut rng = SplitMix64::new(2024);
        let rows = p.sample(10_000, &mut rng);
        for j in 0..2 {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64;
            assert!((mean - p.mean()[j]).abs() <= 0.05, "coordinate {j}: {mean}");
        }
    }

    #[test]
    fn sample_covariance_converges() {
        let cov = SymMatrix::from_rows(&[vec![10.0, 1.0], vec![1.0, 5.0]]).unwrap();
        let p = GaussianParams::new(vec![-4.0, 4.0], cov.clone()).unwrap();
        // Average the empirical covariance over several seeded runs; the
        // per-run sampling error on the largest entry is ~0.14, so the
        // threshold 0.3 holds with a wide margin for the averaged estimate
        // and for any individual run that is not an outlier.
        let seeds = [1u64, 2, 3, 4, 5];
        let mut avg = SymMatrix::zeros(2);
        for &seed in &seeds {
            let rows = p.sample(10_000, &mut SplitMix64::new(seed));
            let n = rows.len() as f64;
            let mean: Vec<f64> = (0..2)
                .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
                .collect();
            let mut emp = SymMatrix::zeros(2);
            for i in 0..2 {
                for j in 0..2 {
                    let s: f64 = rows
                        .iter()
                        .map(|r| (r[i] - mean[i]) * (r[j] - mean[j]))
                        .sum();
                    emp.set_sym(i, j, s / n);
                }
            }
            assert!(emp.max_abs_diff(&cov) <= 0.3, "seed {seed}");
            avg = avg.add(&emp);
        }
        assert!(avg.scaled(1.0 / seeds.len() as f64).max_abs_diff(&cov) <= 0.15);
    }

    #[test]
    fn whitened_log_pdf_matches_quadratic_form() {
        // With identity covariance the log-density is −(d/2)ln(2π) − ½‖z‖².
        let p = GaussianParams::new(vec![0.0, 0.0, 0.0], SymMatrix::identity(3)).unwrap();
        let z = [0.3, -1.2, 2.0];
        let expected = -1.5 * LN_2PI - 0.5 * z.iter().map(|x| x * x).sum::<f64>();
        assert!((p.log_pdf(&z).unwrap() - expected).abs() <= 1e-14);
    }
}
