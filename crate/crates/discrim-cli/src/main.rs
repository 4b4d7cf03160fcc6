//! Command-line driver: generate synthetic datasets, fit classifiers,
//! rasterize decision regions, and run the canned experiment families.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error (unreadable or
//! malformed inputs), 4 numeric degeneracy (singular covariances and kin).

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use discrim::classifier::{Family, FitOptions, FittedClassifier, Likelihood};
use discrim::dataset::LabeledDataset;
use discrim::estimation::{estimate_priors, CovMode};
use discrim::experiment::{run_experiment, ExperimentName, ExperimentOptions};
use discrim::gaussian::GaussianParams;
use discrim::grid::{DecisionGrid, GridBounds};
use discrim::linalg::SymMatrix;
use discrim::mixture::{em_fit, EmOptions};
use discrim::rng::SplitMix64;
use discrim::scenario::{builtin_scenario, ScenarioId};

#[derive(Parser)]
#[command(
    name = "discrim",
    about = "Gaussian discriminant analysis: datasets, classifiers, decision regions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a built-in synthetic scenario as CSV.
    Generate(GenerateArgs),
    /// Fit a classifier from a CSV dataset and save it as JSON.
    Fit(FitArgs),
    /// Rasterize a fitted 2-D model into label CSV and PPM image files.
    Grid(GridArgs),
    /// Run one of the canned experiment families and write a JSON report.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Seed for every random draw the command makes.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key=value file supplying defaults for seed, ridge, resolution,
    /// bounds, and out. Explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Scenario id, a through g.
    #[arg(long)]
    scenario: String,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct FitArgs {
    /// Classifier family: lda, qda, gnb, or bayes.
    #[arg(long)]
    family: String,
    /// Training data CSV.
    #[arg(long)]
    train: PathBuf,
    /// Output model JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Covariance divisor: unbiased or mle.
    #[arg(long, default_value = "unbiased")]
    cov_mode: String,
    /// Ridge added to estimated covariances.
    #[arg(long)]
    ridge: Option<f64>,
    /// For --family bayes: JSON file with exact per-class parameters,
    /// an array of {"mean": [...], "cov": [[...]]} in class order.
    #[arg(long)]
    bayes_true_params: Option<PathBuf>,
    /// For --family bayes: fit a Gaussian mixture with this many components
    /// to every class by EM.
    #[arg(long)]
    bayes_mixture: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct GridArgs {
    /// Fitted model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Output prefix; writes <prefix>.csv and <prefix>.ppm.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
    /// Viewport as xmin,xmax,ymin,ymax. Defaults to the --data bounding box
    /// padded by two pooled standard deviations.
    #[arg(long)]
    bounds: Option<String>,
    /// Grid cell size.
    #[arg(long)]
    resolution: Option<f64>,
    /// Dataset CSV used to derive default bounds.
    #[arg(long)]
    data: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    /// equal-sizes, small-sizes, different-sizes, or multimodal.
    #[arg(long)]
    name: String,
    /// Report JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for the per-classifier grid images (default: alongside the
    /// report).
    #[arg(long)]
    grid_dir: Option<PathBuf>,
    /// Grid cell size.
    #[arg(long)]
    resolution: Option<f64>,
    /// Ridge added to estimated covariances.
    #[arg(long)]
    ridge: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

enum CliError {
    Usage(String),
    Lib(discrim::Error),
}

impl From<discrim::Error> for CliError {
    fn from(e: discrim::Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                discrim::Error::NotPositiveDefinite => {
                    eprintln!(
                        "hint: singular covariance estimates usually mean too few samples \
                         per class; a small --ridge (e.g. 1e-6) regularizes them"
                    );
                    4
                }
                discrim::Error::NoConvergence
                | discrim::Error::NoCrossing
                | discrim::Error::DegenerateMeans
                | discrim::Error::DegenerateComponent { .. } => 4,
                _ => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Grid(args) => cmd_grid(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

/// Flat key=value configuration file. Blank lines and `#` comments allowed.
struct Config(HashMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(discrim::Error::from)?;
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(usage(format!(
                        "{}:{}: expected key=value, got `{line}`",
                        path.display(),
                        idx + 1
                    )));
                };
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key `{key}`: {e}"))),
        }
    }
}

fn resolve<T: std::str::FromStr>(
    flag: Option<T>,
    config: &Config,
    key: &str,
    default: T,
) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    Ok(flag.or(config.get(key)?).unwrap_or(default))
}

fn resolve_out(flag: Option<PathBuf>, config: &Config) -> CliResult<PathBuf> {
    flag.or(config.get::<PathBuf>("out")?)
        .ok_or_else(|| usage("an output path is required (--out or config `out`)"))
}

fn cmd_generate(args: GenerateArgs) -> CliResult<()> {
    let config = Config::load(args.common.config.as_deref())?;
    let seed = resolve(args.common.seed, &config, "seed", 0)?;
    let out = resolve_out(args.out, &config)?;
    let id: ScenarioId = args.scenario.parse()?;
    let ds = builtin_scenario(id).with_seed(seed).generate()?;
    ds.write_csv_path(&out)?;
    println!("wrote {} rows to {}", ds.len(), out.display());
    Ok(())
}

/// Exact class parameters for the plug-in Bayes classifier.
#[derive(serde::Deserialize)]
struct TrueClassParams {
    mean: Vec<f64>,
    cov: SymMatrix,
}

fn cmd_fit(args: FitArgs) -> CliResult<()> {
    let config = Config::load(args.common.config.as_deref())?;
    let seed = resolve(args.common.seed, &config, "seed", 0)?;
    let ridge = resolve(args.ridge, &config, "ridge", 0.0)?;
    let out = resolve_out(args.out, &config)?;
    let family: Family = args.family.parse()?;
    let cov_mode: CovMode = match args.cov_mode.to_ascii_lowercase().as_str() {
        "unbiased" => CovMode::Unbiased,
        "mle" => CovMode::Mle,
        other => return Err(usage(format!("unknown cov-mode `{other}`"))),
    };
    let ds = LabeledDataset::read_csv_path(&args.train)?;

    let clf = match family {
        Family::Lda | Family::Qda | Family::Gnb => {
            FittedClassifier::fit(&ds, family, &FitOptions { cov_mode, ridge })?
        }
        Family::Bayes => match (&args.bayes_true_params, args.bayes_mixture) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path).map_err(discrim::Error::from)?;
                let params: Vec<TrueClassParams> =
                    serde_json::from_str(&text).map_err(discrim::Error::from)?;
                if params.len() != ds.num_classes() {
                    return Err(usage(format!(
                        "{} classes in the data but {} parameter sets in {}",
                        ds.num_classes(),
                        params.len(),
                        path.display()
                    )));
                }
                let likelihoods = params
                    .into_iter()
                    .map(|p| Ok(Likelihood::Gaussian(GaussianParams::new(p.mean, p.cov)?)))
                    .collect::<discrim::Result<Vec<_>>>()?;
                FittedClassifier::make_bayes(estimate_priors(&ds)?, likelihoods)?
            }
            (None, Some(k)) => {
                if k == 0 {
                    return Err(usage("--bayes-mixture needs at least one component"));
                }
                let mut rng = SplitMix64::new(seed);
                let mut likelihoods = Vec::with_capacity(ds.num_classes());
                for class in 0..ds.num_classes() {
                    let points: Vec<Vec<f64>> =
                        ds.class_rows(class).map(|r| r.to_vec()).collect();
                    let fit = em_fit(&points, k, &mut rng, &EmOptions::default())?;
                    likelihoods.push(Likelihood::Mixture(fit.model));
                }
                FittedClassifier::make_bayes(estimate_priors(&ds)?, likelihoods)?
            }
            (Some(_), Some(_)) => {
                return Err(usage(
                    "--bayes-true-params and --bayes-mixture are mutually exclusive",
                ))
            }
            (None, None) => {
                return Err(usage(
                    "--family bayes needs --bayes-true-params <file> or --bayes-mixture <k>",
                ))
            }
        },
    };

    std::fs::write(&out, clf.to_json()?).map_err(discrim::Error::from)?;
    println!(
        "fitted {} on {} rows ({} classes), wrote {}",
        family,
        ds.len(),
        ds.num_classes(),
        out.display()
    );
    Ok(())
}

fn parse_bounds(text: &str) -> CliResult<GridBounds> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(usage("--bounds wants xmin,xmax,ymin,ymax"));
    }
    let mut values = [0.0; 4];
    for (v, part) in values.iter_mut().zip(&parts) {
        *v = part
            .trim()
            .parse()
            .map_err(|e| usage(format!("bad bounds value `{part}`: {e}")))?;
    }
    Ok(GridBounds::new(values[0], values[1], values[2], values[3])?)
}

fn cmd_grid(args: GridArgs) -> CliResult<()> {
    let config = Config::load(args.common.config.as_deref())?;
    let resolution = resolve(args.resolution, &config, "resolution", 0.1)?;
    let out_prefix = args
        .out_prefix
        .or(config.get::<PathBuf>("out")?)
        .ok_or_else(|| usage("an output prefix is required (--out-prefix or config `out`)"))?;
    let bounds_text = args.bounds.or(config.get::<String>("bounds")?);

    let text = std::fs::read_to_string(&args.model).map_err(discrim::Error::from)?;
    let clf = FittedClassifier::from_json(&text)?;

    let bounds = match (bounds_text, &args.data) {
        (Some(text), _) => parse_bounds(&text)?,
        (None, Some(data)) => {
            let ds = LabeledDataset::read_csv_path(data)?;
            GridBounds::from_dataset_padded(&ds, 2.0)?
        }
        (None, None) => {
            return Err(usage(
                "grid bounds unknown: pass --bounds or --data <csv> to derive them",
            ))
        }
    };

    let grid = DecisionGrid::compute(&clf, &bounds, resolution)?;
    let csv_path = out_prefix.with_extension("csv");
    let ppm_path = out_prefix.with_extension("ppm");
    grid.write_csv_path(&csv_path)?;
    grid.write_ppm_path(&ppm_path)?;
    println!(
        "wrote {}x{} grid to {} and {}",
        grid.width(),
        grid.height(),
        csv_path.display(),
        ppm_path.display()
    );
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> CliResult<()> {
    let config = Config::load(args.common.config.as_deref())?;
    let seed = resolve(args.common.seed, &config, "seed", 0)?;
    let resolution = resolve(args.resolution, &config, "resolution", 0.1)?;
    let ridge = resolve(args.ridge, &config, "ridge", 0.0)?;
    let out = resolve_out(args.out, &config)?;
    let name: ExperimentName = args.name.parse()?;

    let opts = ExperimentOptions {
        resolution,
        ridge,
        ..ExperimentOptions::default()
    };
    let result = run_experiment(name, seed, &opts)?;

    let grid_dir = args
        .grid_dir
        .unwrap_or_else(|| out.parent().unwrap_or(Path::new(".")).to_path_buf());
    std::fs::create_dir_all(&grid_dir).map_err(discrim::Error::from)?;
    for run in &result.scenarios {
        for (classifier, grid) in &run.grids {
            let path = grid_dir.join(format!("{name}-{}-{classifier}.ppm", run.scenario));
            grid.write_ppm_path(&path)?;
        }
    }

    let report = serde_json::to_string_pretty(&result.report()).map_err(discrim::Error::from)?;
    std::fs::write(&out, report).map_err(discrim::Error::from)?;
    println!(
        "ran {} (seed {seed}), wrote report to {} and {} grid images to {}",
        name,
        out.display(),
        result.scenarios.len() * 4,
        grid_dir.display()
    );
    Ok(())
}
