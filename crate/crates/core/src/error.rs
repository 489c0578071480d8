use thiserror::Error;

/// Errors raised by the simulator and the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("probability leakage {leakage:.3e} exceeds tolerance {tolerance:.1e}")]
    Leakage { leakage: f64, tolerance: f64 },

    #[error("outcome {slot} is unreachable (probability {probability:.3e})")]
    UnreachableOutcome { slot: usize, probability: f64 },

    #[error("quadrature inadequate: residual {residual:.3e} exceeds {tolerance:.1e}")]
    Quadrature { residual: f64, tolerance: f64 },

    #[error(
        "positivity violated at t = {time}: minimum eigenvalue {min_eigenvalue:.3e} \
         (last step size {step_size:.3e})"
    )]
    Positivity {
        time: f64,
        min_eigenvalue: f64,
        step_size: f64,
    },

    #[error("integrator failed at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    #[error("stochastic step unstable at t = {time}: norm drift {drift:.3e} (step {step_size:.3e})")]
    StepInstability {
        time: f64,
        drift: f64,
        step_size: f64,
    },

    #[error("decay fit rejected: {0}")]
    FitRejected(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
