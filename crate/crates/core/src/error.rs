use thiserror::Error;

/// Broad failure classes, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("point is not in the upper half-plane (x = {x}, y = {y})")]
    InvalidPoint { x: f64, y: f64 },

    #[error("degenerate point: imaginary part underflowed after a transform")]
    DegeneratePoint,

    #[error("matrix [[{a}, {b}], [{c}, {d}]] does not have positive determinant")]
    InvalidTransform { a: f64, b: f64, c: f64, d: f64 },

    #[error("ball budget of {budget} elements exhausted before the frontier emptied")]
    BudgetExhausted { budget: usize },

    #[error("threshold {threshold} exceeds the radius {radius} of an incomplete ball")]
    ThresholdExceedsRadius { threshold: f64, radius: f64 },

    #[error("orbit ball is incomplete")]
    IncompleteBall,

    #[error("orbit ball was built for two different base points")]
    MismatchedBasepoints,

    #[error("ball radius {radius} is below the required {required}")]
    BallTooSmall { radius: f64, required: f64 },

    #[error("systole {found} is not certified by a search radius of {radius} (needs {needed})")]
    UncertifiedSystole { found: f64, radius: f64, needed: f64 },

    #[error("no hyperbolic element found within radius {radius}")]
    NoHyperbolicElement { radius: f64 },

    #[error("radius must be positive, got {0}")]
    NonpositiveRadius(f64),

    #[error("delta = {delta} must exceed r/2 = {half_r}")]
    DeltaTooSmall { delta: f64, half_r: f64 },

    #[error("q-expansion truncated at {terms} terms leaves a tail bound of {bound:e} (tolerance {tol:e})")]
    TruncationInsufficient { terms: usize, bound: f64, tol: f64 },

    #[error("could not reduce point to a region where the q-expansion converges")]
    ReductionFailed,

    #[error("quadrature did not converge: error estimate {estimate:e} above {tol:e}")]
    QuadratureNonconvergent { estimate: f64, tol: f64 },

    #[error("Gram matrix is not positive definite")]
    GramNotPositiveDefinite,

    #[error("forms have inconsistent levels ({0} vs {1})")]
    LevelMismatch(u64, u64),

    #[error("permutation expansion is limited to d <= {max}, got d = {d}")]
    DTooLargeForPermutationPath { d: usize, max: usize },

    #[error("product point needs d = {d} < gonality {gonality}")]
    GonalityExceeded { d: usize, gonality: usize },

    #[error("product point must have at least one coordinate")]
    EmptyProductPoint,

    #[error("level {0} is not prime")]
    LevelNotPrime(u64),

    #[error("genus {genus} of X0({level}) is too small (need g > 1)")]
    GenusTooSmall { level: u64, genus: u64 },

    #[error("no fixture for level {0} and network fetching is unavailable")]
    NetworkUnavailableAndNoFixture(u64),

    #[error("network request failed: {0}")]
    Network(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unknown group '{0}'")]
    UnknownGroup(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            UnknownGroup(_) | Config(_) | NonpositiveRadius(_) | DeltaTooSmall { .. }
            | DTooLargeForPermutationPath { .. } | EmptyProductPoint | LevelNotPrime(_)
            | GonalityExceeded { .. } => ErrorClass::Usage,
            BudgetExhausted { .. } | UncertifiedSystole { .. } | TruncationInsufficient { .. }
            | QuadratureNonconvergent { .. } | GramNotPositiveDefinite | DegeneratePoint
            | ReductionFailed => ErrorClass::Numerical,
            _ => ErrorClass::Data,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
