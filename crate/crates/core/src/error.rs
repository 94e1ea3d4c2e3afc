//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by samplers, link evaluators and analytic routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter violated its documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A geometric degeneracy (zero distance) would make a path-loss term
    /// singular; callers must enforce a minimum separation.
    #[error("singular geometry: {0}")]
    Singularity(String),

    /// Snapshot construction failed (e.g. no base station sampled after the
    /// retry cap).
    #[error("snapshot construction failed: {0}")]
    Snapshot(String),

    /// A closed-form evaluator was asked for a path-loss exponent it is not
    /// derived for (the tractable forms require alpha_i = 4).
    #[error("unsupported path-loss exponent alpha_i = {alpha}: {context}")]
    UnsupportedExponent { alpha: f64, context: &'static str },

    /// Interference diverges (beta kernel pole at alpha <= 2).
    #[error("divergent interference: alpha = {alpha} must exceed 2")]
    DivergentInterference { alpha: f64 },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// A numeric result fell outside its admissible range by more than the
    /// documented tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Power-control target not achievable (target >= Xi).
    #[error("infeasible power-control target {target}: must lie in (0, {limit})")]
    Infeasible { target: f64, limit: f64 },

    /// An error that occurred while evaluating one trial of an experiment.
    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
