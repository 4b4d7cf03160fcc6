//! LDA, QDA, Gaussian naive Bayes, and plug-in Bayes classifiers.
//!
//! All four families rank classes by a discriminant score δ_k — a monotone
//! transform of the scaled posterior π_k f_k(x) — and predict the argmax.
//! They differ only in what f_k is and which class-independent terms get
//! dropped:
//!
//! * QDA: one full-covariance Gaussian per class,
//!   δ_k = −½ln|Σ_k| − ½(x−μ_k)ᵀΣ_k⁻¹(x−μ_k) + ln π_k.
//! * LDA: one covariance pooled across classes; the shared quadratic term
//!   drops, leaving the linear δ_k = μ_kᵀΣ⁻¹x − ½μ_kᵀΣ⁻¹μ_k + ln π_k.
//! * Gaussian naive Bayes: per-feature univariate Gaussians, i.e. QDA with
//!   diagonal covariances, scored as ln π_k plus the sum of feature
//!   log-densities.
//! * Bayes: arbitrary supplied likelihoods (exact Gaussians or mixtures),
//!   δ_k = ln π_k + ln f_k(x).
//!
//! Scores are computed in the log domain throughout; with raw exponentials
//! the likelihoods underflow a few standard deviations out. Ties in the
//! argmax break toward the lowest class index, always.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::estimation::{
    estimate_cov, estimate_feature_params, estimate_mean, estimate_priors, pooled_cov, CovMode,
};
use crate::gaussian::{GaussianParams, LN_2PI};
use crate::linalg::{dot, SymMatrix};
use crate::mixture::MixtureModel;
use crate::{Error, Result};

/// Classifier family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lda,
    Qda,
    Gnb,
    Bayes,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Family::Lda => "lda",
            Family::Qda => "qda",
            Family::Gnb => "gnb",
            Family::Bayes => "bayes",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lda" => Ok(Family::Lda),
            "qda" => Ok(Family::Qda),
            "gnb" | "naive-bayes" => Ok(Family::Gnb),
            "bayes" => Ok(Family::Bayes),
            other => Err(Error::Shape(format!(
                "unknown family `{other}`, expected lda|qda|gnb|bayes"
            ))),
        }
    }
}

/// A class-conditional density.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Likelihood {
    /// Full-covariance Gaussian.
    Gaussian(GaussianParams),
    /// Independent per-feature Gaussians (naive Bayes).
    DiagonalGaussian { means: Vec<f64>, variances: Vec<f64> },
    /// Gaussian mixture.
    Mixture(MixtureModel),
}

impl Likelihood {
    pub fn dim(&self) -> usize {
        match self {
            Likelihood::Gaussian(g) => g.dim(),
            Likelihood::DiagonalGaussian { means, .. } => means.len(),
            Likelihood::Mixture(m) => m.dim(),
        }
    }

    /// Full log-density `ln f(x)`, normalization constants included.
    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        match self {
            Likelihood::Gaussian(g) => g.log_pdf(x),
            Likelihood::DiagonalGaussian { means, variances } => {
                if x.len() != means.len() {
                    return Err(Error::DimensionMismatch {
                        expected: means.len(),
                        actual: x.len(),
                    });
                }
                let mut acc = 0.0;
                for ((xj, mj), vj) in x.iter().zip(means).zip(variances) {
                    let dev = xj - mj;
                    acc += -0.5 * (LN_2PI + vj.ln() + dev * dev / vj);
                }
                Ok(acc)
            }
            Likelihood::Mixture(m) => m.log_pdf(x),
        }
    }
}

/// One class of a fitted classifier: its prior and its likelihood.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassModel {
    pub prior: f64,
    pub likelihood: Likelihood,
}

/// Options for [`FittedClassifier::fit`].
#[derive(Debug, Clone, Default)]
pub struct FitOptions {
    pub cov_mode: CovMode,
    /// Ridge term added to every estimated covariance (and to naive-Bayes
    /// variances). Zero by default; useful when tiny classes make the
    /// estimates singular.
    pub ridge: f64,
}

/// A fitted classifier: family tag, per-class models, and for LDA the
/// covariance shared by every class.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ClassifierRepr", into = "ClassifierRepr")]
pub struct FittedClassifier {
    family: Family,
    labels: Vec<usize>,
    classes: Vec<ClassModel>,
    shared_cov: Option<SymMatrix>,
}

impl FittedClassifier {
    /// Fits LDA, QDA, or Gaussian naive Bayes from labeled data.
    ///
    /// Priors are class frequencies; means are class averages; QDA estimates
    /// one covariance per class while LDA pools them into a single shared
    /// covariance; naive Bayes keeps per-feature means and unbiased
    /// variances. The Bayes family is assembled from explicit likelihoods
    /// via [`FittedClassifier::make_bayes`], not fitted here.
    pub fn fit(ds: &LabeledDataset, family: Family, opts: &FitOptions) -> Result<Self> {
        if family == Family::Bayes {
            return Err(Error::Shape(
                "the bayes family takes explicit likelihoods; use make_bayes".into(),
            ));
        }
        let k = ds.num_classes();
        if k < 2 {
            return Err(Error::TooFewClasses);
        }
        let priors = estimate_priors(ds)?;
        let counts = ds.class_counts();
        for (class, &n_k) in counts.iter().enumerate() {
            if n_k == 0 {
                return Err(Error::EmptyClass { class });
            }
        }
        let means: Vec<Vec<f64>> = (0..k)
            .map(|class| estimate_mean(ds, class))
            .collect::<Result<_>>()?;

        let (classes, shared_cov) = match family {
            Family::Qda => {
                let mut classes = Vec::with_capacity(k);
                for class in 0..k {
                    let cov = estimate_cov(ds, class, opts.cov_mode)?.with_ridge(opts.ridge);
                    classes.push(ClassModel {
                        prior: priors[class],
                        likelihood: Likelihood::Gaussian(GaussianParams::new(
                            means[class].clone(),
                            cov,
                        )?),
                    });
                }
                (classes, None)
            }
            Family::Lda => {
                let per_class: Vec<(usize, SymMatrix)> = (0..k)
                    .map(|class| Ok((counts[class], estimate_cov(ds, class, opts.cov_mode)?)))
                    .collect::<Result<_>>()?;
                let pooled = pooled_cov(&per_class)?.with_ridge(opts.ridge);
                let mut classes = Vec::with_capacity(k);
                for class in 0..k {
                    classes.push(ClassModel {
                        prior: priors[class],
                        likelihood: Likelihood::Gaussian(GaussianParams::new(
                            means[class].clone(),
                            pooled.clone(),
                        )?),
                    });
                }
                (classes, Some(pooled))
            }
            Family::Gnb => {
                // Degenerate (constant) features get their variance floored
                // at 1e-12 times the squared feature range.
                let ranges = ds.feature_ranges();
                let mut classes = Vec::with_capacity(k);
                for class in 0..k {
                    let mut feat_means = Vec::with_capacity(ds.dim());
                    let mut feat_vars = Vec::with_capacity(ds.dim());
                    for j in 0..ds.dim() {
                        let (mean, variance) = estimate_feature_params(ds, class, j)?;
                        let span = ranges[j].1 - ranges[j].0;
                        let floor = 1e-12 * if span > 0.0 { span * span } else { 1.0 };
                        let variance = variance + opts.ridge;
                        let variance = if variance < floor {
                            eprintln!(
                                "warning: class {class} feature {j} has near-zero variance; \
                                 flooring at {floor:e}"
                            );
                            floor
                        } else {
                            variance
                        };
                        feat_means.push(mean);
                        feat_vars.push(variance);
                    }
                    classes.push(ClassModel {
                        prior: priors[class],
                        likelihood: Likelihood::DiagonalGaussian {
                            means: feat_means,
                            variances: feat_vars,
                        },
                    });
                }
                (classes, None)
            }
            Family::Bayes => unreachable!(),
        };

        Ok(Self {
            family,
            labels: (0..k).collect(),
            classes,
            shared_cov,
        })
    }

    /// Assembles a plug-in Bayes classifier from explicit priors and
    /// likelihoods (exact parameters, fitted mixtures, or any mix).
    pub fn make_bayes(priors: Vec<f64>, likelihoods: Vec<Likelihood>) -> Result<Self> {
        if priors.len() != likelihoods.len() {
            return Err(Error::DimensionMismatch {
                expected: priors.len(),
                actual: likelihoods.len(),
            });
        }
        if priors.len() < 2 {
            return Err(Error::TooFewClasses);
        }
        let sum: f64 = priors.iter().sum();
        if priors.iter().any(|p| !(*p > 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::PriorSumInvalid { sum });
        }
        let dim = likelihoods[0].dim();
        for l in &likelihoods {
            if l.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: l.dim(),
                });
            }
        }
        let classes = priors
            .into_iter()
            .zip(likelihoods)
            .map(|(prior, likelihood)| ClassModel { prior, likelihood })
            .collect::<Vec<_>>();
        Ok(Self {
            family: Family::Bayes,
            labels: (0..classes.len()).collect(),
            classes,
            shared_cov: None,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn dim(&self) -> usize {
        self.classes[0].likelihood.dim()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &[ClassModel] {
        &self.classes
    }

    pub fn shared_cov(&self) -> Option<&SymMatrix> {
        self.shared_cov.as_ref()
    }

    pub fn priors(&self) -> Vec<f64> {
        self.classes.iter().map(|c| c.prior).collect()
    }

    /// All K discriminant scores δ_k(x).
    pub fn score(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        match self.family {
            Family::Lda => self
                .classes
                .iter()
                .map(|c| {
                    let Likelihood::Gaussian(g) = &c.likelihood else {
                        unreachable!("lda classes carry gaussian likelihoods");
                    };
                    let sigma_inv_x = g.inverse().mat_vec(x);
                    let mean = g.mean();
                    Ok(dot(mean, &sigma_inv_x) - 0.5 * g.inverse().quad_form(mean)
                        + c.prior.ln())
                })
                .collect(),
            Family::Qda => self
                .classes
                .iter()
                .map(|c| {
                    let Likelihood::Gaussian(g) = &c.likelihood else {
                        unreachable!("qda classes carry gaussian likelihoods");
                    };
                    Ok(-0.5 * g.log_det() - 0.5 * g.mahalanobis_sq(x)? + c.prior.ln())
                })
                .collect(),
            Family::Gnb | Family::Bayes => self
                .classes
                .iter()
                .map(|c| Ok(c.prior.ln() + c.likelihood.log_pdf(x)?))
                .collect(),
        }
    }

    /// Argmax of [`score`](Self::score); ties break toward the lowest class
    /// index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let scores = self.score(x)?;
        let mut best = 0;
        for (k, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = k;
            }
        }
        Ok(best)
    }

    /// Binary discriminant δ(x) = 2(δ₂ − δ₁): negative means class 0,
    /// positive means class 1, and δ(x) = 0 is the decision boundary.
    ///
    /// For QDA this expands to the quadratic form
    /// `xᵀ(Σ₁⁻¹ − Σ₂⁻¹)x + 2(Σ₂⁻¹μ₂ − Σ₁⁻¹μ₁)ᵀx + c`; for LDA the quadratic
    /// coefficient cancels and the boundary is a hyperplane. With equal
    /// priors the `2 ln(π₂/π₁)` term vanishes.
    pub fn binary_delta(&self, x: &[f64]) -> Result<f64> {
        if self.classes.len() != 2 {
            return Err(Error::NotBinary {
                classes: self.classes.len(),
            });
        }
        let scores = self.score(x)?;
        Ok(2.0 * (scores[1] - scores[0]))
    }

    /// Likelihood-ratio classification for binary classifiers: class 1 iff
    /// `π₂ f₂(x) / (π₁ f₁(x)) ≥ t`, evaluated as a log-ratio. `t = 1`
    /// recovers the ordinary decision rule; larger thresholds demand more
    /// evidence before rejecting class 0.
    pub fn lrt_classify(&self, x: &[f64], threshold: f64) -> Result<usize> {
        if self.classes.len() != 2 {
            return Err(Error::NotBinary {
                classes: self.classes.len(),
            });
        }
        assert!(threshold > 0.0, "threshold must be positive");
        // Class-independent constants cancel in the score difference, so
        // this equals ln(π₂f₂) − ln(π₁f₁) for every family.
        let scores = self.score(x)?;
        let log_ratio = scores[1] - scores[0];
        Ok(if log_ratio >= threshold.ln() { 1 } else { 0 })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Serialized layout: `{family, labels, priors, classes, shared_cov}` with
/// per-class entries carrying whichever parameter set the likelihood needs.
/// All reals are decimal doubles (serde_json prints shortest round-trip
/// forms), so save/load reproduces predictions exactly.
#[derive(Serialize, Deserialize)]
struct ClassifierRepr {
    family: Family,
    labels: Vec<usize>,
    priors: Vec<f64>,
    classes: Vec<ClassRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shared_cov: Option<SymMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ClassRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mean: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cov: Option<SymMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feature_params: Option<FeatureParamsRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mixture: Option<MixtureModel>,
}

#[derive(Serialize, Deserialize)]
struct FeatureParamsRepr {
    means: Vec<f64>,
    variances: Vec<f64>,
}

impl From<FittedClassifier> for ClassifierRepr {
    fn from(clf: FittedClassifier) -> Self {
        let priors = clf.priors();
        let is_lda = clf.family == Family::Lda;
        let classes = clf
            .classes
            .into_iter()
            .map(|c| match c.likelihood {
                Likelihood::Gaussian(g) => {
                    let mean = Some(g.mean().to_vec());
                    // LDA stores the covariance once at the top level.
                    let cov = if is_lda { None } else { Some(g.cov().clone()) };
                    ClassRepr {
                        mean,
                        cov,
                        feature_params: None,
                        mixture: None,
                    }
                }
                Likelihood::DiagonalGaussian { means, variances } => ClassRepr {
                    mean: None,
                    cov: None,
                    feature_params: Some(FeatureParamsRepr { means, variances }),
                    mixture: None,
                },
                Likelihood::Mixture(m) => ClassRepr {
                    mean: None,
                    cov: None,
                    feature_params: None,
                    mixture: Some(m),
                },
            })
            .collect();
        ClassifierRepr {
            family: clf.family,
            labels: clf.labels,
            priors,
            classes,
            shared_cov: clf.shared_cov,
        }
    }
}

impl TryFrom<ClassifierRepr> for FittedClassifier {
    type Error = Error;

    fn try_from(repr: ClassifierRepr) -> Result<Self> {
        if repr.priors.len() != repr.classes.len() {
            return Err(Error::Shape(
                "priors and classes must have equal length".into(),
            ));
        }
        let mut classes = Vec::with_capacity(repr.classes.len());
        for (prior, class) in repr.priors.iter().zip(repr.classes) {
            let likelihood = match (class.mean, class.cov, class.feature_params, class.mixture) {
                (Some(mean), Some(cov), None, None) => {
                    Likelihood::Gaussian(GaussianParams::new(mean, cov)?)
                }
                (Some(mean), None, None, None) => {
                    let cov = repr.shared_cov.clone().ok_or_else(|| {
                        Error::Shape("class without covariance needs shared_cov".into())
                    })?;
                    Likelihood::Gaussian(GaussianParams::new(mean, cov)?)
                }
                (None, None, Some(fp), None) => Likelihood::DiagonalGaussian {
                    means: fp.means,
                    variances: fp.variances,
                },
                (None, None, None, Some(m)) => Likelihood::Mixture(m),
                _ => {
                    return Err(Error::Shape(
                        "class must carry exactly one of {mean+cov, feature_params, mixture}"
                            .into(),
                    ))
                }
            };
            classes.push(ClassModel {
                prior: *prior,
                likelihood,
            });
        }
        if classes.len() < 2 {
            return Err(Error::TooFewClasses);
        }
        if repr.family == Family::Lda && repr.shared_cov.is_none() {
            return Err(Error::Shape("lda model needs shared_cov".into()));
        }
        Ok(FittedClassifier {
            family: repr.family,
            labels: repr.labels,
            classes,
            shared_cov: repr.shared_cov,
        })
    }
}
