use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("malformed quantity `{0}`")]
    MalformedQuantity(String),

    #[error("non-finite input: {0}")]
    NonFiniteInput(f64),

    #[error(
        "quadrature did not converge with {nodes} nodes (relative change {relative_change:.3e})"
    )]
    QuadratureNotConverged { nodes: usize, relative_change: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    #[error("visibility {0} outside [0, 1]")]
    InvalidVisibility(f64),

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("{0}")]
    Usage(String),

    #[error("no spectral line within half a bin of {0} Hz")]
    LineNotFound(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
