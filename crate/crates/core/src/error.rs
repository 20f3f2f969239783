use thiserror::Error;

/// Errors produced by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("mesh under-resolved: {have} nodes in the boundary layer, {need} required")]
    UnderResolved { have: usize, need: usize },

    #[error("newton iteration did not converge after {iters} iterations (residual {residual:.3e})")]
    Divergence { iters: usize, residual: f64 },

    #[error("root finder failed: {0}")]
    Root(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("radius {r} lies outside the mesh [0, {radius}]")]
    Extrapolation { r: f64, radius: f64 },

    #[error("sweep aborted at eps = {eps}: {source}")]
    Sweep { eps: f64, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam { name, reason: reason.into() }
}
