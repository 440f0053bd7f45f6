use thiserror::Error;

use crate::measurements::PomViolation;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("colatitude {0} is outside [0, pi]")]
    Colatitude(f64),

    #[error("ensemble needs at least two states, got m = {0}")]
    TooFewStates(usize),

    #[error("theta {0} is outside [0, pi/2]")]
    Theta(f64),

    #[error("amplitudes are not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("the zero vector is not a state")]
    ZeroVector,

    #[error("{what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("outcome label {0} has no assigned signal")]
    UnassignedOutcome(usize),

    #[error("assignment maps outcome {label} to signal {signal}, but the ensemble has {m} states")]
    SignalOutOfRange { label: usize, signal: usize, m: usize },

    #[error("invalid POM: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidPom(Vec<PomViolation>),

    #[error("at least {min} outputs are required, got {got}")]
    TooFewOutputs { min: usize, got: usize },

    #[error(
        "infeasible POM parameters: weight sum residual {:.3e}, z moment {:.3e}, transverse moment {:.3e}",
        .0[0], .0[1], .0[2]
    )]
    Infeasible([f64; 3]),

    #[error("weight {0} is outside [0, 1]")]
    Weight(f64),

    #[error("repair did not converge (residual {0:.3e})")]
    RepairFailed(f64),

    #[error("optimizer configuration: {0}")]
    Config(&'static str),

    #[error("every restart failed repair")]
    OptimizationFailed,

    #[error("trial count must be positive")]
    NoTrials,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
