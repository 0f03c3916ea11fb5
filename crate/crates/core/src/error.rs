use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Population left outside (or on the edge of) the truncated Fock space
    /// exceeds the tolerance.
    #[error("Fock cutoff insufficient for mode {mode}: tail mass {tail:e} exceeds {tolerance:e}")]
    CutoffInsufficient {
        mode: char,
        tail: f64,
        tolerance: f64,
    },

    #[error("coupling must be k_a = k_b = 1/2, got k_a = {k_a}, k_b = {k_b}")]
    InvalidCoupling { k_a: f64, k_b: f64 },

    #[error(
        "coherent-component Gram matrix is numerically singular (condition estimate {condition:e})"
    )]
    IllConditionedFit { condition: f64 },

    #[error("steady state requires gamma > 0")]
    NoDissipation,

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("eigenvalue solver did not converge")]
    NonConvergedEigen,

    #[error("step halving changed a sampled entry by {deviation:e} (limit {tolerance:e})")]
    StepTooLarge { deviation: f64, tolerance: f64 },

    #[error("quadrature did not converge: error estimate {error_estimate:e}")]
    QuadratureNotConverged { error_estimate: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for the truncation and step-size diagnostics raised by the oracle.
    pub fn is_numerical_diagnostic(&self) -> bool {
        matches!(
            self,
            Error::CutoffInsufficient { .. }
                | Error::StepTooLarge { .. }
                | Error::QuadratureNotConverged { .. }
        )
    }
}
