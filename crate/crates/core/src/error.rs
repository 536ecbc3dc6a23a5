use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Numerical,
    Io,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Validation => 2,
            ErrorCategory::Numerical => 3,
            ErrorCategory::Io => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("points must have 2 or 3 coordinates, got {0}")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("need at least {needed} anchors in {dim}-D, got {found}")]
    TooFewAnchors { needed: usize, dim: usize, found: usize },
    #[error("degenerate anchor geometry: {0}")]
    DegenerateGeometry(String),
    #[error("source is not strictly inside the open convex hull of the anchors")]
    OutsideHull,
    #[error("point coincides with anchor {anchor}")]
    CoincidentWithAnchor { anchor: usize },
    #[error("peak-count coefficient is not representable in linear space (ln alpha = {ln_alpha})")]
    AlphaUnrepresentable { ln_alpha: f64 },
    #[error("Poisson rate {0} is outside the supported range [0, 1e9]")]
    PoissonRate(f64),
    #[error("sensor {sensor} reported a zero peak count")]
    ZeroMeasurement { sensor: usize },
    #[error("expected {expected} measurements, got {found}")]
    MeasurementCount { expected: usize, found: usize },
    #[error("invalid measurement at sensor {sensor}: {reason}")]
    InvalidMeasurement { sensor: usize, reason: &'static str },
    #[error("empty measurement series")]
    EmptySeries,
    #[error("least-squares system is rank deficient")]
    RankDeficient,
    #[error("Fisher information is singular or ill-conditioned (condition number {condition:e})")]
    SingularFisher { condition: f64 },
    #[error("non-finite cost at iteration {iteration}")]
    NonFiniteCost { iteration: usize },
    #[error("all {trials} trials failed at sweep point {point}")]
    AllTrialsFailed { point: usize, trials: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            UnsupportedDimension(_)
            | DimensionMismatch { .. }
            | NonFinite(_)
            | NonPositive { .. }
            | TooFewAnchors { .. }
            | DegenerateGeometry(_)
            | OutsideHull
            | MeasurementCount { .. }
            | InvalidMeasurement { .. }
            | EmptySeries
            | Config(_) => ErrorCategory::Validation,
            CoincidentWithAnchor { .. }
            | AlphaUnrepresentable { .. }
            | PoissonRate(_)
            | ZeroMeasurement { .. }
            | RankDeficient
            | SingularFisher { .. }
            | NonFiniteCost { .. }
            | AllTrialsFailed { .. } => ErrorCategory::Numerical,
            Io(_) | Json(_) | Csv(_) => ErrorCategory::Io,
        }
    }
}
