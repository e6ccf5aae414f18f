use thiserror::Error;

/// Errors raised by the geometry, measure and flow routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate simplex (volume {volume:e})")]
    DegenerateSimplex { volume: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("chain has no time coordinate")]
    MissingTimeFlag,

    #[error("point {0:?} is too close to the domain boundary for the difference stencil")]
    StencilOutsideDomain(Vec<f64>),

    #[error("map `{0}` is not injective on its domain")]
    NotInjective(String),

    #[error("degenerate co-area ratio: right-hand side vanishes (spatial set)")]
    DegenerateRatio,

    #[error("snapshot correspondence broken between snapshots {0} and {1}")]
    CorrespondenceBroken(usize, usize),

    #[error("flow did not reach extinction after {steps} steps (t = {time})")]
    NoExtinction {
        steps: usize,
        time: f64,
        partial: Box<crate::flow::FlowHistory>,
    },

    #[error("no bracketing tip height found: {0}")]
    NoBracket(String),

    #[error("unknown registry entry `{0}`")]
    UnknownEntry(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
