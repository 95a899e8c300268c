use thiserror::Error;

use crate::field::FieldError;
use crate::parse::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("degree {0} is too small: the analysis needs d >= 2")]
    DegreeTooSmall(usize),
    #[error("characteristic {characteristic} is too small for degree {degree}: need p > 3d")]
    SmallCharacteristic { characteristic: u64, degree: usize },
    #[error(
        "curve is not reduced: dim M(f) is {at_t_plus_1} in degree {} but {at_t_plus_2} in degree {}",
        .t + 1,
        .t + 2
    )]
    NotReduced {
        t: usize,
        at_t_plus_1: usize,
        at_t_plus_2: usize,
    },
    #[error("curve is a pencil of lines (a Jacobian syzygy of degree 0 exists)")]
    PencilOfLines,
    #[error("internal consistency check failed (bad prime?): {0}")]
    Inconsistent(String),
    #[error("resolution incomplete: no balanced set of generators found up to degree {searched_to}")]
    IncompleteResolution { searched_to: usize },
    #[error("resolution does not balance: {0}")]
    BalanceViolation(String),
    #[error("the two primes disagree: {0}")]
    PrimeDisagreement(String),
    #[error("degree {degree} is above the oracle cap {cap}: pass --exponents for a formula-only run, or --force-oracle")]
    OracleSkipped { degree: usize, cap: usize },
    #[error("invalid request: {0}")]
    Usage(String),
}

impl AnalysisError {
    /// Errors caused by the input itself rather than by the computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            AnalysisError::Parse(_)
                | AnalysisError::DegreeTooSmall(_)
                | AnalysisError::SmallCharacteristic { .. }
                | AnalysisError::NotReduced { .. }
                | AnalysisError::OracleSkipped { .. }
                | AnalysisError::Usage(_)
                | AnalysisError::Field(FieldError::NotPrime(_))
                | AnalysisError::Field(FieldError::ModulusOutOfRange { .. })
        )
    }
}
