use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no feasible M: theta {theta} does not exceed r^n = {r_pow_n}")]
    NoFeasibleM { theta: f64, r_pow_n: f64 },

    #[error("degenerate probe: probe coincides with the sample mean")]
    DegenerateProbe,

    #[error("degenerate point at index {0}: zero norm")]
    DegeneratePoint(usize),

    #[error("covariance matrix is singular and regularization is forbidden")]
    SingularCovariance,

    #[error("oracle instance too large: M = {m}, n = {n} (limits M <= 500, n <= 50)")]
    OracleTooLarge { m: usize, n: usize },

    #[error("too many violators: {count} points fall in the cap, need at most {limit}")]
    TooManyViolators { count: usize, limit: usize },

    #[error("probe norm {norm} does not exceed r = {r}")]
    ProbeNotInLayer { norm: f64, r: f64 },

    #[error("point is not separable (margin {margin})")]
    NotSeparable { margin: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("resource budget exceeded: {requested} coordinates requested, budget {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
