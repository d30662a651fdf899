use thiserror::Error;

use crate::povm::Constraint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Measurement parameters outside the admissible (λ, γ) region.
    #[error("{0}")]
    InvalidParams(Constraint),

    #[error("magnetic quantum number {m} is not one of -{j}..={j} in unit steps")]
    MagneticNumberOutOfRange { m: f64, j: f64 },

    #[error("grid point {index} (lambda = {lambda}, gamma = {gamma}): {constraint}")]
    InvalidGridPoint { index: usize, lambda: f64, gamma: f64, constraint: Constraint },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A probability or normalization check failed beyond tolerance. This
    /// indicates a bug in the numerics, never bad user input.
    #[error("numerical consistency failure: {0}")]
    Numerical(String),

    #[error("threshold pre-scan found {crossings} violation sign changes for {condition} (expected one)")]
    MultipleCrossings { condition: String, crossings: usize },

    #[error("violation of {condition} vanishes as lambda increases; no threshold is defined")]
    ReversedCrossing { condition: String },
}

impl Error {
    /// True for errors caused by caller-supplied parameters.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::InvalidGridPoint { .. }
                | Error::MagneticNumberOutOfRange { .. }
                | Error::InvalidArgument(_)
        )
    }
}
