//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("smoothness order beta must be a finite number greater than 1, got {0}")]
    InvalidBeta(f64),

    #[error("strong convexity parameter gamma must be positive, got {0}")]
    InvalidGamma(f64),

    #[error("sigma = 0 degenerates the noise-optimal smoothing schedule; set an explicit tau_override")]
    MissingTauOverride,

    #[error("iteration budget must be at least 1")]
    EmptyBudget,

    #[error("starting point lies outside the feasible set (distance {0:.3e})")]
    StartOutsideSet(f64),

    #[error(
        "objective domain (radius {domain}) does not cover the tau-inflated feasible set (radius {needed})"
    )]
    DomainTooSmall { domain: f64, needed: f64 },

    #[error("oracle query at iteration {iteration} left the declared domain (|x| = {norm}, domain radius {domain})")]
    DomainViolation {
        iteration: u64,
        norm: f64,
        domain: f64,
    },

    #[error("oracle returned a non-finite value at iteration {iteration}")]
    NonFiniteValue { iteration: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
