use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A Cholesky pivot fell below tolerance: the matrix is singular or
    /// indefinite. For covariance estimates this usually means too few
    /// samples per class; a small ridge term works around it.
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    /// The Jacobi eigensolver did not reduce the off-diagonal mass within
    /// its sweep budget.
    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("malformed input: {0}")]
    Shape(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("class {class} has no samples")]
    EmptyClass { class: usize },

    #[error("class {class} needs at least {needed} samples, got {actual}")]
    InsufficientSamples {
        class: usize,
        needed: usize,
        actual: usize,
    },

    #[error("a classifier needs at least two classes")]
    TooFewClasses,

    #[error("priors must be positive and sum to 1, got sum {sum}")]
    PriorSumInvalid { sum: f64 },

    #[error("operation requires a binary classifier, got {classes} classes")]
    NotBinary { classes: usize },

    /// The scaled class densities never intersect, so no boundary exists.
    /// Possible only with unequal variances and extreme priors.
    #[error("class densities have no crossing point")]
    NoCrossing,

    #[error("not a squared-distance matrix: {0}")]
    NotDistanceMatrix(&'static str),

    #[error("class means coincide; the discriminant direction is undefined")]
    DegenerateMeans,

    #[error("mixture component {component} collapsed during fitting")]
    DegenerateComponent { component: usize },

    #[error("mixture fit needs at least {needed} points, got {actual}")]
    TooFewPoints { needed: usize, actual: usize },

    #[error("unknown scenario `{0}`, expected one of a..g")]
    UnknownScenario(String),

    #[error("decision grids require a 2-D model, got dimension {dim}")]
    NonPlanarModel { dim: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
