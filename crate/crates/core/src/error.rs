use thiserror::Error;

/// Errors raised by the channel, noise and integrator routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("unsupported matrix dimension {0} (only 2 and 4 are supported)")]
    UnsupportedDimension(usize),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid lambda vector: {0}")]
    InvalidLambda(String),

    #[error("map is not completely positive (radicands {radicands:?})")]
    NotCompletelyPositive { radicands: [f64; 4] },

    #[error("no closed form for {0}; use quadrature")]
    NoClosedForm(String),

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Convergence { achieved: f64, requested: f64 },

    #[error("invalid noise model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration unstable: {0}")]
    Unstable(String),

    #[error("closed form not applicable: {0}")]
    UnsupportedFormula(String),
}

pub type Result<T> = std::result::Result<T, Error>;
