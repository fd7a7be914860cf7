use thiserror::Error;

/// Errors produced by the numerical library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field contains non-finite values ({context})")]
    NonFinite { context: String },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("operation `{op}` is undefined on the zero field")]
    ZeroField { op: &'static str },

    #[error("field is not projectable onto the constraint set (B = {b:.6e} >= 0)")]
    NotProjectable { b: f64 },

    #[error("bracket does not straddle: s_lo={s_lo} -> {lo_class}, s_hi={s_hi} -> {hi_class}")]
    BracketInvalid {
        s_lo: f64,
        s_hi: f64,
        lo_class: String,
        hi_class: String,
    },

    #[error("no convergence after {iterations} iterations: {context}")]
    NoConvergence { iterations: usize, context: String },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("certification failure: {0}")]
    CertificationFailure(String),

    #[error("malformed data: {0}")]
    MalformedData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
