//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Array/grid shapes do not match.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A configured resource budget (degree cap, shell size) was exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// An iteration failed to converge.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// A time-quadrature rule failed its self-calibration gate.
    #[error("uncalibrated time quadrature: {0}")]
    Uncalibrated(String),

    /// A spatial integral does not capture enough of its integrand.
    #[error("tail mass too large: {0}")]
    TailMass(String),

    /// A symbol produced a non-finite value or could not be resolved.
    #[error("symbol error: {0}")]
    Symbol(String),

    /// Configuration file / CLI parse problem.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
