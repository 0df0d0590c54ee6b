//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure classes for every operation in the crate.
///
/// Each variant corresponds to one externally visible error class; the CLI
/// maps them to distinct exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Inputs that are individually valid but mutually inconsistent in shape.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input violates its own invariants (non-stochastic row, bad range, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// The predicted distribution is zero where the true one is positive and
    /// no smoothing was supplied, so the divergence is infinite.
    #[error("singular divergence: {0}")]
    Singularity(String),

    /// An iterative solver ran out of iterations before certifying its bound.
    #[error("iteration limit {max_iter} reached (remaining bound gap {gap:.3e})")]
    IterationLimit { max_iter: usize, gap: f64 },

    /// An exact enumeration would exceed the configured cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A scalar argument is outside the mathematical domain of the formula.
    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    /// Stable machine-readable class name, used in CLI error objects.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Validation(_) => "validation",
            Error::Singularity(_) => "singularity",
            Error::IterationLimit { .. } => "iteration_limit",
            Error::Resource(_) => "resource",
            Error::Domain(_) => "domain",
        }
    }
}
