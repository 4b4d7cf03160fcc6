//! Whitening, Mahalanobis geometry, double-centering, and Fisher directions.
//!
//! These operations are the metric-learning face of Gaussian classifiers.
//! The Mahalanobis quadratic (x−μ)ᵀΣ⁻¹(x−μ) that drives every discriminant
//! score is exactly squared Euclidean distance after the per-class whitening
//! map φ: x ↦ Λ^{−1/2}Uᵀx built from Σ = U Λ Uᵀ. Double-centering converts a
//! squared-distance matrix into the centered Gram (kernel) matrix, the same
//! construction classical multidimensional scaling starts from. The Fisher
//! direction maximizes between-class over within-class variance and, with a
//! pooled covariance, is collinear with the LDA boundary normal — the two
//! methods choose the same one-dimensional subspace.

use crate::classifier::{FittedClassifier, Likelihood};
use crate::dataset::LabeledDataset;
use crate::estimation::{estimate_cov, estimate_mean, pooled_cov, CovMode};
use crate::gaussian::GaussianParams;
use crate::linalg::{dot, generalized_eig_max, norm, SymMatrix};
use crate::{Error, Result};

/// The map φ: x ↦ Λ^{−1/2} Uᵀ x that sends `N(μ, Σ)` samples to identity
/// covariance (up to the mean shift).
#[derive(Debug, Clone)]
pub struct WhiteningTransform {
    /// Λ^{−1/2}: reciprocal square roots of the eigenvalues.
    scale: Vec<f64>,
    /// Uᵀ stored row-major: row i is the i-th eigenvector.
    rotation: Vec<f64>,
    source: SymMatrix,
}

impl WhiteningTransform {
    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    /// The covariance this transform was built from.
    pub fn source(&self) -> &SymMatrix {
        &self.source
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: x.len(),
            });
        }
        Ok((0..d)
            .map(|i| {
                let row = &self.rotation[i * d..(i + 1) * d];
                self.scale[i] * dot(row, x)
            })
            .collect())
    }
}

/// Builds the whitening transform from a Gaussian's covariance via its
/// eigendecomposition. For any x,
/// `‖φ(x) − φ(μ)‖² = (x−μ)ᵀΣ⁻¹(x−μ)`.
pub fn whitening(params: &GaussianParams) -> Result<WhiteningTransform> {
    let eig = params.cov().eigen()?;
    let d = params.dim();
    let mut scale = Vec::with_capacity(d);
    for k in 0..d {
        let lambda = eig.value(k);
        if !(lambda > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        scale.push(1.0 / lambda.sqrt());
    }
    let mut rotation = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            // Row i of Uᵀ is eigenvector i.
            rotation[i * d + j] = eig.vector_component(j, i);
        }
    }
    Ok(WhiteningTransform {
        scale,
        rotation,
        source: params.cov().clone(),
    })
}

/// Squared Mahalanobis distance `(x−μ)ᵀ Σ⁻¹ (x−μ)` from the Gaussian's mean.
/// Nonnegative, zero exactly at the mean, and equal to squared Euclidean
/// distance when Σ = I.
pub fn mahalanobis_sq(params: &GaussianParams, x: &[f64]) -> Result<f64> {
    params.mahalanobis_sq(x)
}

/// Double-centering `K = −½ H D H` with `H = I − (1/n)11ᵀ`.
///
/// `D` must be a squared-distance matrix: square, symmetric, zero diagonal,
/// nonnegative. If `D` holds squared Euclidean distances of points X, the
/// result is the Gram matrix of the row-centered X.
pub fn double_center(d: &[Vec<f64>]) -> Result<SymMatrix> {
    let n = d.len();
    if n == 0 {
        return Err(Error::NotDistanceMatrix("matrix is empty"));
    }
    for row in d {
        if row.len() != n {
            return Err(Error::NotDistanceMatrix("matrix is not square"));
        }
    }
    for i in 0..n {
        if d[i][i] != 0.0 {
            return Err(Error::NotDistanceMatrix("diagonal is not zero"));
        }
        for j in 0..n {
            if d[i][j] < 0.0 {
                return Err(Error::NotDistanceMatrix("negative entry"));
            }
            if d[i][j] != d[j][i] {
                return Err(Error::NotDistanceMatrix("matrix is not symmetric"));
            }
        }
    }
    let row_means: Vec<f64> = d.iter().map(|row| row.iter().sum::<f64>() / n as f64).collect();
    let grand_mean = row_means.iter().sum::<f64>() / n as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| -0.5 * (d[i][j] - row_means[i] - row_means[j] + grand_mean))
                .collect()
        })
        .collect();
    SymMatrix::from_rows(&rows)
}

/// A unit direction maximizing the Fisher criterion, with the criterion
/// value attained there.
#[derive(Debug, Clone)]
pub struct FisherDirection {
    /// Unit-norm direction, first non-negligible component positive.
    pub direction: Vec<f64>,
    /// `(uᵀ(μ₂−μ₁))² / uᵀ(Σ₂+Σ₁)u` at the returned direction.
    pub criterion: f64,
}

/// The Fisher criterion `(uᵀ(μ₂−μ₁))² / uᵀ(Σ₂+Σ₁)u` at an arbitrary
/// direction.
pub fn fisher_criterion(
    u: &[f64],
    mean1: &[f64],
    mean2: &[f64],
    cov1: &SymMatrix,
    cov2: &SymMatrix,
) -> f64 {
    let diff: Vec<f64> = mean2.iter().zip(mean1).map(|(a, b)| a - b).collect();
    let projected = dot(u, &diff);
    let within = cov1.add(cov2).quad_form(u);
    projected * projected / within
}

/// Direction maximizing the ratio of projected between-class variance to
/// projected within-class variance.
///
/// The maximizer solves the generalized eigenproblem with the rank-one
/// between-class scatter `(μ₂−μ₁)(μ₂−μ₁)ᵀ` against `Σ₁+Σ₂`, which makes it
/// collinear with `(Σ₁+Σ₂)⁻¹(μ₂−μ₁)`.
pub fn fisher_direction(
    mean1: &[f64],
    mean2: &[f64],
    cov1: &SymMatrix,
    cov2: &SymMatrix,
) -> Result<FisherDirection> {
    if mean1.len() != mean2.len() {
        return Err(Error::DimensionMismatch {
            expected: mean1.len(),
            actual: mean2.len(),
        });
    }
    let diff: Vec<f64> = mean2.iter().zip(mean1).map(|(a, b)| a - b).collect();
    if diff.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateMeans);
    }
    let between = SymMatrix::outer(&diff);
    let within = cov1.add(cov2);
    let top = generalized_eig_max(&between, &within)?;
    let criterion = fisher_criterion(&top.vector, mean1, mean2, cov1, cov2);
    Ok(FisherDirection {
        direction: top.vector,
        criterion,
    })
}

/// Comparison of the Fisher direction against the LDA boundary normal, both
/// estimated from a two-class dataset with a pooled covariance.
#[derive(Debug, Clone)]
pub struct LdaFdaReport {
    /// |cos| between the two directions. Equality of the subspaces means
    /// this is 1 up to roundoff.
    pub cosine: f64,
    /// Signed factor s with `lda_normal ≈ s · fisher`: the methods agree up
    /// to this scale.
    pub scale: f64,
    pub fisher: FisherDirection,
    /// `Σ̂_pooled⁻¹ (μ̂₂ − μ̂₁)`, the normal of the LDA boundary.
    pub lda_normal: Vec<f64>,
}

/// Fits both directions from data and reports how collinear they are.
pub fn lda_fda_equivalence(ds: &LabeledDataset) -> Result<LdaFdaReport> {
    if ds.num_classes() != 2 {
        return Err(Error::NotBinary {
            classes: ds.num_classes(),
        });
    }
    let counts = ds.class_counts();
    let mean1 = estimate_mean(ds, 0)?;
    let mean2 = estimate_mean(ds, 1)?;
    let pooled = pooled_cov(&[
        (counts[0], estimate_cov(ds, 0, CovMode::Unbiased)?),
        (counts[1], estimate_cov(ds, 1, CovMode::Unbiased)?),
    ])?;
    let fisher = fisher_direction(&mean1, &mean2, &pooled, &pooled)?;
    let diff: Vec<f64> = mean2.iter().zip(&mean1).map(|(a, b)| a - b).collect();
    let lda_normal = pooled.cholesky()?.solve(&diff);
    let cosine = dot(&fisher.direction, &lda_normal).abs() / norm(&lda_normal);
    let scale = dot(&fisher.direction, &lda_normal);
    Ok(LdaFdaReport {
        cosine,
        scale,
        fisher,
        lda_normal,
    })
}

/// Rewrites a QDA score through the whitening transform:
/// `−½ln|Σ_k| − ½‖φ_k(x) − φ_k(μ_k)‖² + ln π_k`.
///
/// Agrees with [`FittedClassifier::score`] for QDA classifiers; exposed for
/// checking that identity.
pub fn whitened_qda_score(clf: &FittedClassifier, x: &[f64]) -> Result<Vec<f64>> {
    clf.classes()
        .iter()
        .map(|class| {
            let Likelihood::Gaussian(g) = &class.likelihood else {
                return Err(Error::Shape(
                    "whitened scoring needs gaussian likelihoods".into(),
                ));
            };
            let transform = whitening(g)?;
            let fx = transform.apply(x)?;
            let fmu = transform.apply(g.mean())?;
            let sq: f64 = fx.iter().zip(&fmu).map(|(a, b)| (a - b) * (a - b)).sum();
            Ok(-0.5 * g.log_det() - 0.5 * sq + class.prior.ln())
        })
        .collect()
}
