use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid of {grid} points aliases a window of {needed} frequencies")]
    Aliasing { grid: usize, needed: usize },

    #[error("coefficient tail {tail:e} at the Nyquist edge exceeds {tol:e}; increase the sample count (M = {grid})")]
    TailNotDecayed { tail: f64, tol: f64, grid: usize },

    #[error("lemma hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("digit position {0} exceeds exact integer width")]
    DepthOverflow(u32),

    #[error("point is exactly the dyadic {numer}/2^{level}")]
    ExactDyadic { numer: u64, level: u32 },

    #[error("generation {requested} exceeds the configured cap {cap}")]
    GenerationTooLarge { requested: u32, cap: u32 },

    #[error("point {x} is outside the interval family {family}")]
    PointOutsideFamily { x: f64, family: String },

    #[error("logarithm branch undefined: Re f = {re:e} at sample {index}")]
    LogBranch { re: f64, index: usize },

    #[error("empty point set")]
    EmptySet,

    #[error("{0} is outside the domain (0, 1)")]
    Domain(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
