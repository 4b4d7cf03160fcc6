//! Gaussian mixture models and EM fitting.
//!
//! A mixture is a convex combination of full-covariance Gaussians; its
//! log-density is a log-sum-exp over component log-densities, so far-tail
//! points evaluate without underflow. Fitting is plain
//! expectation-maximization: means seeded k-means++ style, covariances
//! started at the global covariance, responsibilities and parameters
//! alternated until the per-point log-likelihood stops improving. Several
//! restarts guard against poor seeds and the best final likelihood wins.

use serde::{Deserialize, Serialize};

use crate::gaussian::GaussianParams;
use crate::linalg::SymMatrix;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// One weighted component.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub gaussian: GaussianParams,
}

/// A finite Gaussian mixture with weights summing to one.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MixtureRepr", into = "MixtureRepr")]
pub struct MixtureModel {
    components: Vec<MixtureComponent>,
}

#[derive(Serialize, Deserialize)]
struct MixtureRepr {
    weights: Vec<f64>,
    components: Vec<GaussianParams>,
}

impl TryFrom<MixtureRepr> for MixtureModel {
    type Error = Error;

    fn try_from(repr: MixtureRepr) -> Result<Self> {
        if repr.weights.len() != repr.components.len() {
            return Err(Error::Shape(
                "mixture weights and components must have equal length".into(),
            ));
        }
        MixtureModel::new(
            repr.weights
                .into_iter()
                .zip(repr.components)
                .map(|(weight, gaussian)| MixtureComponent { weight, gaussian })
                .collect(),
        )
    }
}

impl From<MixtureModel> for MixtureRepr {
    fn from(m: MixtureModel) -> Self {
        MixtureRepr {
            weights: m.components.iter().map(|c| c.weight).collect(),
            components: m.components.into_iter().map(|c| c.gaussian).collect(),
        }
    }
}

impl MixtureModel {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Shape("mixture needs at least one component".into()));
        }
        let sum: f64 = components.iter().map(|c| c.weight).sum();
        if components.iter().any(|c| !(c.weight > 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::PriorSumInvalid { sum });
        }
        let dim = components[0].gaussian.dim();
        for c in &components {
            if c.gaussian.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: c.gaussian.dim(),
                });
            }
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].gaussian.dim()
    }

    /// `ln Σ w_k f_k(x)` by log-sum-exp over `ln w_k + ln f_k(x)`.
    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.components.len());
        for c in &self.components {
            terms.push(c.weight.ln() + c.gaussian.log_pdf(x)?);
        }
        Ok(log_sum_exp(&terms))
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().fold(f64::NEG_INFINITY, |m, &t| m.max(t));
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Knobs for [`em_fit`]. The defaults match how the crate's experiments run.
#[derive(Debug, Clone)]
pub struct EmOptions {
    /// Hard cap on EM iterations per restart.
    pub max_iterations: usize,
    /// Stop once the per-point log-likelihood gain drops below this.
    pub tolerance: f64,
    /// Independent restarts; the best final log-likelihood wins.
    pub restarts: usize,
    /// Covariance floor as a fraction of `trace(global Σ)/d`, added to a
    /// component covariance whenever it loses positive definiteness.
    pub covariance_floor: f64,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-8,
            restarts: 5,
            covariance_floor: 1e-6,
        }
    }
}

/// Outcome of an EM run: the winning model plus its diagnostics.
#[derive(Debug, Clone)]
pub struct EmFit {
    pub model: MixtureModel,
    /// Final total log-likelihood of the winning restart.
    pub log_likelihood: f64,
    /// Log-likelihood after every iteration of the winning restart.
    /// EM guarantees this is nondecreasing up to roundoff.
    pub history: Vec<f64>,
    /// How many times a collapsing covariance needed the floor. Repeated
    /// engagements suggest the component count is too high for the data.
    pub floor_engagements: usize,
}

/// Fits a `k`-component Gaussian mixture to `points` by EM.
///
/// Components in the returned model are sorted by their first mean
/// coordinate so repeated runs serialize identically.
pub fn em_fit(
    points: &[Vec<f64>],
    k: usize,
    rng: &mut SplitMix64,
    opts: &EmOptions,
) -> Result<EmFit> {
    assert!(k >= 1, "component count must be positive");
    let n = points.len();
    let dim = points.first().map(|p| p.len()).unwrap_or(0);
    let needed = k * (dim + 1);
    if n < needed || dim == 0 {
        return Err(Error::TooFewPoints {
            needed: needed.max(1),
            actual: n,
        });
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.len(),
            });
        }
    }

    let global_mean: Vec<f64> = (0..dim)
        .map(|j| points.iter().map(|p| p[j]).sum::<f64>() / n as f64)
        .collect();
    let mut global_cov = SymMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let s: f64 = points
                .iter()
                .map(|p| (p[i] - global_mean[i]) * (p[j] - global_mean[j]))
                .sum();
            global_cov.set_sym(i, j, s / n as f64);
        }
    }
    let floor = opts.covariance_floor * global_cov.trace() / dim as f64;

    let mut best: Option<SingleRun> = None;
    for _ in 0..opts.restarts.max(1) {
        let mut sub = rng.split();
        let run = em_single_run(points, k, &global_cov, floor, opts, &mut sub)?;
        if best
            .as_ref()
            .map(|b| run.log_likelihood > b.log_likelihood)
            .unwrap_or(true)
        {
            best = Some(run);
        }
    }
    let run = best.expect("at least one restart ran");

    let mut indexed: Vec<(f64, MixtureComponent)> = run
        .components
        .into_iter()
        .map(|c| (c.gaussian.mean()[0], c))
        .collect();
    indexed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let model = MixtureModel::new(indexed.into_iter().map(|(_, c)| c).collect())?;
    Ok(EmFit {
        model,
        log_likelihood: run.log_likelihood,
        history: run.history,
        floor_engagements: run.floor_engagements,
    })
}

struct SingleRun {
    components: Vec<MixtureComponent>,
    log_likelihood: f64,
    history: Vec<f64>,
    floor_engagements: usize,
}

fn em_single_run(
    points: &[Vec<f64>],
    k: usize,
    global_cov: &SymMatrix,
    floor: f64,
    opts: &EmOptions,
    rng: &mut SplitMix64,
) -> Result<SingleRun> {
    let n = points.len();
    let dim = points[0].len();
    let mut floor_engagements = 0usize;

    let guard = |mean: Vec<f64>, cov: SymMatrix, component: usize, engagements: &mut usize| {
        match GaussianParams::new(mean.clone(), cov.clone()) {
            Ok(g) => Ok(g),
            Err(Error::NotPositiveDefinite) => {
                *engagements += 1;
                GaussianParams::new(mean, cov.with_ridge(floor))
                    .map_err(|_| Error::DegenerateComponent { component })
            }
            Err(e) => Err(e),
        }
    };

    // k-means++-style seeding: first mean uniform, later means drawn with
    // probability proportional to squared distance from the chosen set.
    let mut means: Vec<Vec<f64>> = vec![points[rng.next_index(n)].clone()];
    while means.len() < k {
        let dists: Vec<f64> = points
            .iter()
            .map(|p| {
                means
                    .iter()
                    .map(|m| p.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = dists.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.next_f64() * total;
            let mut chosen = n - 1;
            for (i, d) in dists.iter().enumerate() {
                if target < *d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.next_index(n)
        };
        means.push(points[next].clone());
    }

    let mut components = Vec::with_capacity(k);
    for (c, mean) in means.into_iter().enumerate() {
        components.push(MixtureComponent {
            weight: 1.0 / k as f64,
            gaussian: guard(mean, global_cov.clone(), c, &mut floor_engagements)?,
        });
    }

    let mut history = Vec::new();
    let mut responsibilities = vec![0.0; n * k];
    let mut previous = f64::NEG_INFINITY;
    for _ in 0..opts.max_iterations {
        // E-step.
        let mut log_likelihood = 0.0;
        for (i, p) in points.iter().enumerate() {
            let mut terms = Vec::with_capacity(k);
            for c in &components {
                terms.push(c.weight.ln() + c.gaussian.log_pdf(p)?);
            }
            let lse = log_sum_exp(&terms);
            log_likelihood += lse;
            for (c, t) in terms.iter().enumerate() {
                responsibilities[i * k + c] = (t - lse).exp();
            }
        }
        history.push(log_likelihood);

        // M-step.
        let mut mass = vec![0.0; k];
        for i in 0..n {
            for c in 0..k {
                mass[c] += responsibilities[i * k + c];
            }
        }
        let total_mass: f64 = mass.iter().sum();
        for (c, &m) in mass.iter().enumerate() {
            if m <= f64::EPSILON * n as f64 {
                return Err(Error::DegenerateComponent { component: c });
            }
            let mut mean = vec![0.0; dim];
            for (i, p) in points.iter().enumerate() {
                let r = responsibilities[i * k + c];
                for (acc, &x) in mean.iter_mut().zip(p) {
                    *acc += r * x;
                }
            }
            for v in &mut mean {
                *v /= m;
            }
            let mut cov = SymMatrix::zeros(dim);
            for a in 0..dim {
                for b in 0..dim {
                    let mut s = 0.0;
                    for (i, p) in points.iter().enumerate() {
                        s += responsibilities[i * k + c] * (p[a] - mean[a]) * (p[b] - mean[b]);
                    }
                    cov.set_sym(a, b, s / m);
                }
            }
            components[c] = MixtureComponent {
                weight: m / total_mass,
                gaussian: guard(mean, cov, c, &mut floor_engagements)?,
            };
        }

        let current = *history.last().unwrap();
        if (current - previous) / (n as f64) < opts.tolerance {
            break;
        }
        previous = current;
    }

    Ok(SingleRun {
        log_likelihood: *history.last().unwrap(),
        components,
        history,
        floor_engagements,
    })
}
