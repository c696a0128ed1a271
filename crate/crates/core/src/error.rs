use thiserror::Error;

use crate::arith::Place;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero is not allowed here")]
    ZeroInput,
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(String),
    #[error("cofactor {0} is composite and beyond the trial-division bound")]
    CompositeCofactor(String),
    #[error("roots must be pairwise distinct (singular curve)")]
    SingularCurve,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("class triple does not have square norm")]
    NormViolation,
    #[error("{0} is not squarefree")]
    NotSquarefree(String),
    /// The computation could not decide at this precision; retry with more.
    #[error("indeterminate at {place} with precision {precision}")]
    Indeterminate { place: Place, precision: u32 },
    #[error("covering has no points over the completion at {0}")]
    Unsolvable(Place),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn is_indeterminate(&self) -> bool {
        matches!(self, Error::Indeterminate { .. })
    }
}
