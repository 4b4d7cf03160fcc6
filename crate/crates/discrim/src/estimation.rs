//! Parameter estimators for class-conditional Gaussians.
//!
//! Priors are class frequencies, means are per-class averages, covariances
//! come in the maximum-likelihood flavor (divide by `n_k`) and the unbiased
//! flavor (divide by `n_k − 1`), and the pooled covariance is the
//! sample-size-weighted average of the per-class estimates. All second
//! moments are computed in two passes — mean first, then deviations — which
//! avoids the cancellation the one-pass formula suffers from.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::linalg::SymMatrix;
use crate::{Error, Result};

/// Which covariance divisor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CovMode {
    /// Maximum likelihood: divide by `n_k`.
    Mle,
    /// Unbiased: divide by `n_k − 1` (needs at least two samples).
    #[default]
    Unbiased,
}

/// Class priors `n_k / n`.
pub fn estimate_priors(ds: &LabeledDataset) -> Result<Vec<f64>> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = ds.len() as f64;
    Ok(ds
        .class_counts()
        .iter()
        .map(|&n_k| n_k as f64 / n)
        .collect())
}

/// Arithmetic mean of the rows in class `k`.
pub fn estimate_mean(ds: &LabeledDataset, class: usize) -> Result<Vec<f64>> {
    let mut mean = vec![0.0; ds.dim()];
    let mut count = 0usize;
    for row in ds.class_rows(class) {
        for (m, &x) in mean.iter_mut().zip(row) {
            *m += x;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyClass { class });
    }
    for m in &mut mean {
        *m /= count as f64;
    }
    Ok(mean)
}

/// Covariance of class `k`: the sum of deviation outer products divided by
/// `n_k` (MLE) or `n_k − 1` (unbiased).
pub fn estimate_cov(ds: &LabeledDataset, class: usize, mode: CovMode) -> Result<SymMatrix> {
    let mean = estimate_mean(ds, class)?;
    let n_k = ds.class_rows(class).count();
    if mode == CovMode::Unbiased && n_k < 2 {
        return Err(Error::InsufficientSamples {
            class,
            needed: 2,
            actual: n_k,
        });
    }
    let d = ds.dim();
    let mut sums = vec![0.0; d * d];
    for row in ds.class_rows(class) {
        let dev: Vec<f64> = row.iter().zip(&mean).map(|(x, m)| x - m).collect();
        for i in 0..d {
            for j in 0..d {
                sums[i * d + j] += dev[i] * dev[j];
            }
        }
    }
    let divisor = match mode {
        CovMode::Mle => n_k as f64,
        CovMode::Unbiased => (n_k - 1) as f64,
    };
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| sums[i * d + j] / divisor).collect())
        .collect();
    SymMatrix::from_rows(&rows)
}

/// Sample-size-weighted average `Σ n_k Σ̂_k / Σ n_k`.
pub fn pooled_cov(per_class: &[(usize, SymMatrix)]) -> Result<SymMatrix> {
    let Some((_, first)) = per_class.first() else {
        return Err(Error::EmptyDataset);
    };
    let d = first.dim();
    let mut total = 0usize;
    let mut acc = SymMatrix::zeros(d);
    for (n_k, cov) in per_class {
        if cov.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: cov.dim(),
            });
        }
        acc = acc.add(&cov.scaled(*n_k as f64));
        total += n_k;
    }
    if total == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(acc.scaled(1.0 / total as f64))
}

/// Per-class, per-feature mean and unbiased variance of coordinate
/// `feature`, as used by Gaussian naive Bayes.
pub fn estimate_feature_params(
    ds: &LabeledDataset,
    class: usize,
    feature: usize,
) -> Result<(f64, f64)> {
    assert!(feature < ds.dim(), "feature index out of range");
    let n_k = ds.class_rows(class).count();
    if n_k == 0 {
        return Err(Error::EmptyClass { class });
    }
    if n_k < 2 {
        return Err(Error::InsufficientSamples {
            class,
            needed: 2,
            actual: n_k,
        });
    }
    let mean = ds.class_rows(class).map(|r| r[feature]).sum::<f64>() / n_k as f64;
    let variance = ds
        .class_rows(class)
        .map(|r| (r[feature] - mean) * (r[feature] - mean))
        .sum::<f64>()
        / (n_k - 1) as f64;
    Ok((mean, variance))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: Vec<(Vec<f64>, usize)>) -> LabeledDataset {
        LabeledDataset::new(rows).unwrap()
    }

    #[test]
    fn priors_are_class_frequencies() {
        let mut rows = Vec::new();
        for _ in 0..200 {
            rows.push((vec![0.0], 0));
            rows.push((vec![0.0], 1));
            rows.push((vec![0.0], 2));
        }
        let priors = estimate_priors(&ds(rows)).unwrap();
        for p in &priors {
            assert!((p - 1.0 / 3.0).abs() <= 1e-15);
        }
        assert!((priors.iter().sum::<f64>() - 1.0).abs() <= 1e-15);

        let mut rows = Vec::new();
        for _ in 0..200 {
            rows.push((vec![0.0], 0));
        }
        for _ in 0..10 {
            rows.push((vec![0.0], 1));
        }
        let priors = estimate_priors(&ds(rows)).unwrap();
        assert!((priors[0] - 200.0 / 210.0).abs() <= 1e-15);
        assert!((priors[1] - 10.0 / 210.0).abs() <= 1e-15);

        let single = estimate_priors(&ds(vec![(vec![0.0], 0)])).unwrap();
        assert_eq!(single, vec![1.0]);
    }

    #[test]
    fn mean_of_two_points_is_midpoint() {
        let data = ds(vec![(vec![1.0, 1.0], 0), (vec![3.0, 3.0], 0)]);
        assert_eq!(estimate_mean(&data, 0).unwrap(), vec![2.0, 2.0]);
    }

    #[test]
    fn mean_of_single_row_is_that_row() {
        let data = ds(vec![(vec![4.5, -2.0], 0)]);
        assert_eq!(estimate_mean(&data, 0).unwrap(), vec![4.5, -2.0]);
    }

    #[test]
    fn mean_of_missing_class_errors() {
        let data = ds(vec![(vec![0.0], 0), (vec![0.0], 2)]);
        assert!(matches!(
            estimate_mean(&data, 1),
            Err(Error::EmptyClass { class: 1 })
        ));
    }

    #[test]
    fn covariance_hand_example() {
        // Deviations (∓1, 0): outer-product sum [[2,0],[0,0]].
        let data = ds(vec![(vec![0.0, 0.0], 0), (vec![2.0, 0.0], 0)]);
        let unbiased = estimate_cov(&data, 0, CovMode::Unbiased).unwrap();
        assert_eq!(unbiased.get(0, 0), 2.0);
        assert_eq!(unbiased.get(0, 1), 0.0);
        assert_eq!(unbiased.get(1, 1), 0.0);
        let mle = estimate_cov(&data, 0, CovMode::Mle).unwrap();
        assert_eq!(mle.get(0, 0), 1.0);
    }

    #[test]
    fn covariance_of_identical_rows_is_zero() {
        let data = ds(vec![(vec![1.0, 2.0], 0); 5]);
        let cov = estimate_cov(&data, 0, CovMode::Unbiased).unwrap();
        assert_eq!(cov.max_abs(), 0.0);
    }

    #[test]
    fn unbiased_covariance_needs_two_samples() {
        let data = ds(vec![(vec![1.0], 0)]);
        assert!(matches!(
            estimate_cov(&data, 0, CovMode::Unbiased),
            Err(Error::InsufficientSamples { .. })
        ));
        // MLE of a single point is the zero matrix.
        let mle = estimate_cov(&data, 0, CovMode::Mle).unwrap();
        assert_eq!(mle.get(0, 0), 0.0);
    }

    #[test]
    fn mle_is_scaled_unbiased() {
        let data = ds(vec![
            (vec![0.0, 1.0], 0),
            (vec![2.0, -1.0], 0),
            (vec![1.0, 4.0], 0),
            (vec![-2.0, 0.5], 0),
        ]);
        let n_k = 4.0;
        let mle = estimate_cov(&data, 0, CovMode::Mle).unwrap();
        let unbiased = estimate_cov(&data, 0, CovMode::Unbiased).unwrap();
        let scaled = unbiased.scaled((n_k - 1.0) / n_k);
        assert!(mle.max_abs_diff(&scaled) <= 1e-15 * mle.max_abs().max(1.0));
    }

    #[test]
    fn pooled_covariance_examples() {
        let sigma = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let pooled = pooled_cov(&[(3, sigma.clone()), (7, sigma.clone())]).unwrap();
        assert!(pooled.max_abs_diff(&sigma) <= 1e-15);

        // (1·2 + 3·6) / 4 = 5.
        let pooled = pooled_cov(&[
            (1, SymMatrix::from_diagonal(&[2.0])),
            (3, SymMatrix::from_diagonal(&[6.0])),
        ])
        .unwrap();
        assert_eq!(pooled.get(0, 0), 5.0);

        let single = pooled_cov(&[(4, sigma.clone())]).unwrap();
        assert!(single.max_abs_diff(&sigma) <= 1e-15);
    }

    #[test]
    fn pooled_covariance_rejects_mismatched_dims() {
        let a = SymMatrix::identity(2);
        let b = SymMatrix::identity(3);
        assert!(matches!(
            pooled_cov(&[(1, a), (1, b)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn feature_params_hand_example() {
        let data = ds(vec![(vec![0.0, 9.0], 0), (vec![2.0, 9.0], 0)]);
        let (mean, var) = estimate_feature_params(&data, 0, 0).unwrap();
        assert_eq!(mean, 1.0);
        assert_eq!(var, 2.0);
        // Constant feature: zero variance, left to the caller to flag.
        let (_, var) = estimate_feature_params(&data, 0, 1).unwrap();
        assert_eq!(var, 0.0);
    }

    #[test]
    fn feature_params_match_covariance_diagonal() {
        let data = ds(vec![
            (vec![0.3, -1.0], 0),
            (vec![1.7, 2.0], 0),
            (vec![-0.9, 0.4], 0),
            (vec![2.2, 1.1], 0),
        ]);
        let cov = estimate_cov(&data, 0, CovMode::Unbiased).unwrap();
        for j in 0..2 {
            let (_, var) = estimate_feature_params(&data, 0, j).unwrap();
            assert!((var - cov.get(j, j)).abs() <= 1e-12);
        }
    }

    #[test]
    fn estimators_are_permutation_invariant() {
        let rows = vec![
            (vec![0.3, -1.0], 0),
            (vec![1.7, 2.0], 1),
            (vec![-0.9, 0.4], 0),
            (vec![2.2, 1.1], 1),
            (vec![0.0, 0.0], 0),
        ];
        let mut reversed = rows.clone();
        reversed.reverse();
        let a = ds(rows);
        let b = ds(reversed);
        assert_eq!(estimate_priors(&a).unwrap(), estimate_priors(&b).unwrap());
        for class in 0..2 {
            let ma = estimate_mean(&a, class).unwrap();
            let mb = estimate_mean(&b, class).unwrap();
            for (x, y) in ma.iter().zip(&mb) {
                assert!((x - y).abs() <= 1e-12);
            }
            let ca = estimate_cov(&a, class, CovMode::Mle).unwrap();
            let cb = estimate_cov(&b, class, CovMode::Mle).unwrap();
            assert!(ca.max_abs_diff(&cb) <= 1e-12);
        }
    }

    #[test]
    fn estimated_mean_converges_to_generator() {
        use crate::gaussian::GaussianParams;
        use crate::rng::SplitMix64;
        let cov = SymMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let p = GaussianParams::new(vec![3.0, -3.0], cov).unwrap();
        let rows: Vec<(Vec<f64>, usize)> = p
            .sample(10_000, &mut SplitMix64::new(8))
            .into_iter()
            .map(|x| (x, 0))
            .collect();
        let mean = estimate_mean(&ds(rows), 0).unwrap();
        assert!((mean[0] - 3.0).abs() <= 0.1);
        assert!((mean[1] + 3.0).abs() <= 0.1);
    }
}
