use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one failure class of
/// the pipeline so the CLI can translate it into an exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampling failure at node ({x}, {y}): non-finite value")]
    SamplingFailure { x: f64, y: f64 },

    #[error("support overflow: density is nonzero inside the outer margin of the window")]
    SupportOverflow,

    #[error("fixed-point iteration diverged at iteration {iteration}: gap ratio {ratio:.4} exceeds contraction bound {bound:.4}")]
    Divergence {
        iteration: usize,
        ratio: f64,
        bound: f64,
    },

    #[error("no convergence after {iterations} iterations (last relative gap {last_gap:.3e}, residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        last_gap: f64,
        residual: f64,
    },

    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate node: |g_w| <= |g_wbar|")]
    Degenerate,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
