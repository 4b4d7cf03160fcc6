//! Built-in synthetic scenarios: seven seeded two-dimensional Gaussian
//! datasets, labeled `a` through `g`, spanning equal, small, unbalanced, and
//! multi-modal class sizes. The same three generator distributions underlie
//! all of them:
//!
//! * class 1: μ = (−4, 4), Σ = [[10, 1], [1, 5]]
//! * class 2: μ = (3, −3), Σ = [[3, 0], [0, 4]]
//! * class 3: μ = (−3, 3), Σ = [[6, 1.5], [1.5, 4]]
//!
//! | id | classes | sizes            | notes                         |
//! |----|---------|------------------|-------------------------------|
//! | a  | 3       | 200/200/200      | all three generators          |
//! | b  | 2       | 200/200          | classes 1 and 2               |
//! | c  | 3       | 10/10/10         | small samples                 |
//! | d  | 2       | 10/10            | classes 1 and 2, small        |
//! | e  | 3       | 200/100/10       | unbalanced priors             |
//! | f  | 2       | 200/10           | classes 1 and 2, unbalanced   |
//! | g  | 2       | 400/200          | first class bimodal (1 ∪ 2), second is class 3 |

use crate::dataset::LabeledDataset;
use crate::gaussian::GaussianParams;
use crate::linalg::SymMatrix;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Identifier of a built-in scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 7] = [
        ScenarioId::A,
        ScenarioId::B,
        ScenarioId::C,
        ScenarioId::D,
        ScenarioId::E,
        ScenarioId::F,
        ScenarioId::G,
    ];
}

impl std::fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            ScenarioId::A => 'a',
            ScenarioId::B => 'b',
            ScenarioId::C => 'c',
            ScenarioId::D => 'd',
            ScenarioId::E => 'e',
            ScenarioId::F => 'f',
            ScenarioId::G => 'g',
        };
        write!(f, "{c}")
    }
}

impl std::str::FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(ScenarioId::A),
            "b" => Ok(ScenarioId::B),
            "c" => Ok(ScenarioId::C),
            "d" => Ok(ScenarioId::D),
            "e" => Ok(ScenarioId::E),
            "f" => Ok(ScenarioId::F),
            "g" => Ok(ScenarioId::G),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

/// One Gaussian mode of a class: its generator and sample count.
#[derive(Debug, Clone)]
pub struct ModeSpec {
    pub count: usize,
    pub mean: Vec<f64>,
    pub cov: SymMatrix,
}

/// A class as a union of one or more modes.
#[derive(Debug, Clone)]
pub struct ClassSpec {
    pub modes: Vec<ModeSpec>,
}

impl ClassSpec {
    pub fn count(&self) -> usize {
        self.modes.iter().map(|m| m.count).sum()
    }

    /// The generator parameters if this class is a single Gaussian.
    pub fn single_mode(&self) -> Option<&ModeSpec> {
        match self.modes.as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }
}

/// A full generation recipe: scenario id, per-class generators, and the seed
/// the draw starts from.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub classes: Vec<ClassSpec>,
    pub seed: u64,
}

fn generator(index: usize) -> (Vec<f64>, SymMatrix) {
    match index {
        0 => (
            vec![-4.0, 4.0],
            SymMatrix::from_rows(&[vec![10.0, 1.0], vec![1.0, 5.0]]).unwrap(),
        ),
        1 => (
            vec![3.0, -3.0],
            SymMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap(),
        ),
        2 => (
            vec![-3.0, 3.0],
            SymMatrix::from_rows(&[vec![6.0, 1.5], vec![1.5, 4.0]]).unwrap(),
        ),
        _ => unreachable!("only three generators exist"),
    }
}

fn single(index: usize, count: usize) -> ClassSpec {
    let (mean, cov) = generator(index);
    ClassSpec {
        modes: vec![ModeSpec { count, mean, cov }],
    }
}

/// The built-in recipe for a scenario, seeded with 0. Override the seed
/// before generating for fresh draws.
pub fn builtin_scenario(id: ScenarioId) -> ScenarioSpec {
    let classes = match id {
        ScenarioId::A => vec![single(0, 200), single(1, 200), single(2, 200)],
        ScenarioId::B => vec![single(0, 200), single(1, 200)],
        ScenarioId::C => vec![single(0, 10), single(1, 10), single(2, 10)],
        ScenarioId::D => vec![single(0, 10), single(1, 10)],
        ScenarioId::E => vec![single(0, 200), single(1, 100), single(2, 10)],
        ScenarioId::F => vec![single(0, 200), single(1, 10)],
        ScenarioId::G => {
            // Bimodal class: an even split over the first two generators.
            let (mean_a, cov_a) = generator(0);
            let (mean_b, cov_b) = generator(1);
            vec![
                ClassSpec {
                    modes: vec![
                        ModeSpec {
                            count: 200,
                            mean: mean_a,
                            cov: cov_a,
                        },
                        ModeSpec {
                            count: 200,
                            mean: mean_b,
                            cov: cov_b,
                        },
                    ],
                },
                single(2, 200),
            ]
        }
    };
    ScenarioSpec {
        id,
        classes,
        seed: 0,
    }
}

impl ScenarioSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Draws the dataset. A pure function of the spec: the same recipe and
    /// seed always produce the same rows.
    pub fn generate(&self) -> Result<LabeledDataset> {
        let mut rng = SplitMix64::new(self.seed);
        let mut rows = Vec::new();
        for (label, class) in self.classes.iter().enumerate() {
            for mode in &class.modes {
                let params = GaussianParams::new(mode.mean.clone(), mode.cov.clone())?;
                for x in params.sample(mode.count, &mut rng) {
                    rows.push((x, label));
                }
            }
        }
        LabeledDataset::new(rows)
    }
}
