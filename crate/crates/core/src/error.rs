use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("no equilibrium found: {0}")]
    NoEquilibrium(String),

    #[error("frequency ratio {ratio} is not achievable with a power-law trap (must exceed 1)")]
    InfeasibleRatio { ratio: f64 },

    #[error("expansion order {0} outside the supported range 3..=6")]
    OrderOutOfRange(u32),

    #[error("channel is not completely positive and trace preserving: {0}")]
    NotCptp(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("every scan point failed; first: {message}")]
    ScanFailed { message: String, code: i32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    ///
    /// 1 covers configuration and usage problems, 2 physically infeasible
    /// requests, 3 numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleRatio { .. } | Error::NoEquilibrium(_) => 2,
            Error::Convergence(_) | Error::Numeric(_) | Error::NotCptp(_) => 3,
            Error::ScanFailed { code, .. } => *code,
            _ => 1,
        }
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Numeric(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
