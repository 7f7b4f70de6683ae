use thiserror::Error;

/// Broad failure class, used by the command-line driver to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Inputs violate a documented invariant.
    Validation,
    /// A numerical procedure failed on valid inputs.
    Numerical,
    /// Inputs are valid but outside what the delta-shock theory covers.
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no sign change of the entropy polynomial on ({lo}, {hi})")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("{count} sign changes of the entropy polynomial on ({lo}, {hi}); refusing to pick one")]
    MultipleRootsInBracket { lo: f64, hi: f64, count: usize },

    #[error("U(xi)^k - xi does not change sign on [{lo}, {hi}]; domain too small")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("input profile is not monotone nonincreasing at node {index}")]
    NonMonotone { index: usize },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("invariant violated at iteration {iteration}: {what}")]
    InvariantViolation { iteration: usize, what: String },

    #[error("exponential weight not representable ({0}); grid too coarse for this epsilon")]
    Underresolved(String),

    #[error("negative density {value:e} in cell {cell} after step {step}")]
    NegativeDensity { step: usize, cell: usize, value: f64 },

    #[error("CFL condition violated: {0}")]
    CflViolation(String),

    #[error("no mass concentration detected (peak {peak}, threshold {threshold})")]
    NoConcentration { peak: f64, threshold: f64 },

    #[error("test function rejected: {0}")]
    TestFunction(String),
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::InvalidProblem(_)
            | Error::InvalidConfig(_)
            | Error::InvalidArgument(_)
            | Error::NonMonotone { .. }
            | Error::TestFunction(_) => Category::Validation,
            Error::UnsupportedConfiguration(_) => Category::Unsupported,
            Error::NoRootInBracket { .. }
            | Error::MultipleRootsInBracket { .. }
            | Error::NoSignChange { .. }
            | Error::NonConvergence { .. }
            | Error::InvariantViolation { .. }
            | Error::Underresolved(_)
            | Error::NegativeDensity { .. }
            | Error::CflViolation(_)
            | Error::NoConcentration { .. } => Category::Numerical,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
