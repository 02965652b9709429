//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the analytic evaluators, the quadrature and the
/// finite-difference solver.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A numeric input was NaN or infinite.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter lies outside its admissible range (ω, γ, a, δ, h, W, ...).
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// A point lies outside the domain (or support) of an evaluator.
    #[error("point outside domain: {0}")]
    Domain(String),

    /// Grid construction failed (empty interior, degenerate box).
    #[error("grid error: {0}")]
    Grid(String),

    /// Quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: requested {requested:e}, achieved {achieved:e}")]
    Quadrature { requested: f64, achieved: f64 },

    /// Policy or power iteration failed to make progress.
    #[error("iteration failed: {0}")]
    Iteration(String),

    /// An assembled linear operator violated the M-matrix sign structure.
    #[error("monotonicity violated: {0}")]
    Monotonicity(String),

    /// Serialization or file output failed.
    #[error("output error: {0}")]
    Output(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
