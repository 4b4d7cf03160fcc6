//! The four canned experiment families: generate a scenario, fit all four
//! classifier families, and measure how much they agree.
//!
//! Each run draws its scenario(s) from the seed, makes a stratified 80/20
//! train/test split, fits LDA, QDA and Gaussian naive Bayes on the training
//! rows, and assembles the plug-in Bayes classifier from the scenario's true
//! generator parameters (priors still estimated from the training split).
//! The multimodal family is the exception: the bimodal class has no single
//! true Gaussian, so its likelihood is a two-component mixture fitted by EM
//! to the training rows of that class. Every classifier is then rasterized
//! over one shared lattice — the training bounding box padded by two pooled
//! standard deviations — and the report collects held-out accuracies,
//! pairwise grid agreement, and per-class region cell counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classifier::{Family, FitOptions, FittedClassifier, Likelihood};
use crate::dataset::LabeledDataset;
use crate::estimation::estimate_priors;
use crate::gaussian::GaussianParams;
use crate::grid::{DecisionGrid, GridBounds};
use crate::mixture::{em_fit, EmOptions};
use crate::rng::SplitMix64;
use crate::scenario::{builtin_scenario, ScenarioId, ScenarioSpec};
use crate::{Error, Result};

/// Which experiment family to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    EqualSizes,
    SmallSizes,
    DifferentSizes,
    Multimodal,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 4] = [
        ExperimentName::EqualSizes,
        ExperimentName::SmallSizes,
        ExperimentName::DifferentSizes,
        ExperimentName::Multimodal,
    ];

    /// The scenarios each family runs.
    pub fn scenarios(&self) -> &'static [ScenarioId] {
        match self {
            ExperimentName::EqualSizes => &[ScenarioId::A, ScenarioId::B],
            ExperimentName::SmallSizes => &[ScenarioId::C, ScenarioId::D],
            ExperimentName::DifferentSizes => &[ScenarioId::E, ScenarioId::F],
            ExperimentName::Multimodal => &[ScenarioId::G],
        }
    }
}

impl std::fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ExperimentName::EqualSizes => "equal-sizes",
            ExperimentName::SmallSizes => "small-sizes",
            ExperimentName::DifferentSizes => "different-sizes",
            ExperimentName::Multimodal => "multimodal",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "equal-sizes" => Ok(ExperimentName::EqualSizes),
            "small-sizes" => Ok(ExperimentName::SmallSizes),
            "different-sizes" => Ok(ExperimentName::DifferentSizes),
            "multimodal" => Ok(ExperimentName::Multimodal),
            other => Err(Error::Shape(format!(
                "unknown experiment `{other}`, expected \
                 equal-sizes|small-sizes|different-sizes|multimodal"
            ))),
        }
    }
}

/// Tunables for [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    /// Grid cell size.
    pub resolution: f64,
    /// Ridge added to estimated covariances (see [`FitOptions`]).
    pub ridge: f64,
    /// Held-out fraction of each class.
    pub test_fraction: f64,
    /// Bounding-box padding in pooled standard deviations.
    pub padding_stds: f64,
    /// Mixture size for the multimodal Bayes likelihood.
    pub mixture_components: usize,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            resolution: 0.1,
            ridge: 0.0,
            test_fraction: 0.2,
            padding_stds: 2.0,
            mixture_components: 2,
        }
    }
}

/// Everything measured about one scenario within an experiment run.
/// Serializes as one block of the JSON report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub train_counts: Vec<usize>,
    pub test_counts: Vec<usize>,
    pub bounds: (f64, f64, f64, f64),
    pub resolution: f64,
    /// Held-out accuracy per classifier.
    pub accuracy: BTreeMap<String, f64>,
    /// Pairwise fraction of grid cells with equal labels, keyed
    /// `"<a>_vs_<b>"` in family order lda, qda, gnb, bayes.
    pub grid_agreement: BTreeMap<String, f64>,
    /// Grid cells claimed by each class, per classifier.
    pub region_cells: BTreeMap<String, Vec<usize>>,
}

/// One scenario's fitted classifiers and grids, alongside its report block.
pub struct ScenarioRun {
    pub scenario: ScenarioId,
    pub report: ScenarioReport,
    /// Grids keyed by classifier name, same keys as the report maps.
    pub grids: BTreeMap<String, DecisionGrid>,
}

/// A full experiment run: per-scenario results plus the serializable report.
pub struct ExperimentResult {
    pub name: ExperimentName,
    pub seed: u64,
    pub scenarios: Vec<ScenarioRun>,
}

/// The serializable half of [`ExperimentResult`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub scenarios: Vec<ScenarioReport>,
}

impl ExperimentResult {
    pub fn report(&self) -> ExperimentReport {
        ExperimentReport {
            experiment: self.name.to_string(),
            seed: self.seed,
            scenarios: self.scenarios.iter().map(|s| s.report.clone()).collect(),
        }
    }
}

pub const CLASSIFIER_NAMES: [&str; 4] = ["lda", "qda", "gnb", "bayes"];

/// Runs one experiment family end to end. Deterministic in `(name, seed,
/// opts)`.
pub fn run_experiment(
    name: ExperimentName,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<ExperimentResult> {
    let mut scenarios = Vec::new();
    for &id in name.scenarios() {
        let spec = builtin_scenario(id).with_seed(seed);
        scenarios.push(run_scenario(&spec, name, seed, opts)?);
    }
    Ok(ExperimentResult {
        name,
        seed,
        scenarios,
    })
}

fn run_scenario(
    spec: &ScenarioSpec,
    name: ExperimentName,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<ScenarioRun> {
    let ds = spec.generate()?;
    // Split and EM seeds derive from the scenario draw's seed so the whole
    // run is a function of one number.
    let mut derived = SplitMix64::new(seed ^ 0x5EED_5EED_5EED_5EED);
    let (train, test) = ds.stratified_split(opts.test_fraction, &mut derived);

    let fit_opts = FitOptions {
        ridge: opts.ridge,
        ..FitOptions::default()
    };
    let mut classifiers: BTreeMap<String, FittedClassifier> = BTreeMap::new();
    classifiers.insert(
        "lda".into(),
        FittedClassifier::fit(&train, Family::Lda, &fit_opts)?,
    );
    classifiers.insert(
        "qda".into(),
        FittedClassifier::fit(&train, Family::Qda, &fit_opts)?,
    );
    classifiers.insert(
        "gnb".into(),
        FittedClassifier::fit(&train, Family::Gnb, &fit_opts)?,
    );
    classifiers.insert(
        "bayes".into(),
        bayes_classifier(spec, name, &train, opts, &mut derived)?,
    );

    let bounds = GridBounds::from_dataset_padded(&train, opts.padding_stds)?;
    let mut grids: BTreeMap<String, DecisionGrid> = BTreeMap::new();
    for (name, clf) in &classifiers {
        grids.insert(
            name.clone(),
            DecisionGrid::compute(clf, &bounds, opts.resolution)?,
        );
    }

    let mut accuracy = BTreeMap::new();
    for (name, clf) in &classifiers {
        let correct = test
            .rows()
            .iter()
            .filter(|(x, label)| clf.predict(x).map(|p| p == *label).unwrap_or(false))
            .count();
        accuracy.insert(name.clone(), correct as f64 / test.len() as f64);
    }

    let mut grid_agreement = BTreeMap::new();
    for (i, a) in CLASSIFIER_NAMES.iter().enumerate() {
        for b in &CLASSIFIER_NAMES[i + 1..] {
            let value = grids[*a].agreement(&grids[*b])?;
            grid_agreement.insert(format!("{a}_vs_{b}"), value);
        }
    }

    let region_cells: BTreeMap<String, Vec<usize>> = grids
        .iter()
        .map(|(name, grid)| (name.clone(), grid.class_counts().to_vec()))
        .collect();

    let report = ScenarioReport {
        scenario: spec.id.to_string(),
        train_counts: train.class_counts(),
        test_counts: test.class_counts(),
        bounds: (bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max),
        resolution: opts.resolution,
        accuracy,
        grid_agreement,
        region_cells,
    };
    Ok(ScenarioRun {
        scenario: spec.id,
        report,
        grids,
    })
}

/// The plug-in Bayes classifier for a scenario: true generator likelihoods
/// with priors estimated from the training split. Multimodal classes get an
/// EM-fitted mixture instead, since no single true Gaussian exists for them.
fn bayes_classifier(
    spec: &ScenarioSpec,
    name: ExperimentName,
    train: &LabeledDataset,
    opts: &ExperimentOptions,
    rng: &mut SplitMix64,
) -> Result<FittedClassifier> {
    let priors = estimate_priors(train)?;
    let mut likelihoods = Vec::with_capacity(spec.classes.len());
    for (label, class) in spec.classes.iter().enumerate() {
        let likelihood = match class.single_mode() {
            Some(mode) => Likelihood::Gaussian(GaussianParams::new(
                mode.mean.clone(),
                mode.cov.clone(),
            )?),
            None => {
                debug_assert_eq!(name, ExperimentName::Multimodal);
                let points: Vec<Vec<f64>> =
                    train.class_rows(label).map(|r| r.to_vec()).collect();
                let fit = em_fit(
                    &points,
                    opts.mixture_components,
                    rng,
                    &EmOptions::default(),
                )?;
                Likelihood::Mixture(fit.model)
            }
        };
        likelihoods.push(likelihood);
    }
    FittedClassifier::make_bayes(priors, likelihoods)
}
