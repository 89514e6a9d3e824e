use crate::model::HouseRange;
use crate::rational::Rational;
use crate::tie::TieReport;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApportionError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("house size {house_size} is outside the achievable range {range}")]
    Infeasible { house_size: u64, range: HouseRange },

    #[error("tie: {0}")]
    Tie(TieReport),

    /// The divisor sits exactly on a rounding boundary of at least one state.
    #[error("divisor {divisor} is a rounding boundary for {}", states.join(", "))]
    BoundaryDivisor { divisor: Rational, states: Vec<String> },
}

/// Coarse error classes shared by the CLI exit codes and the HTTP service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Invalid,
    Infeasible,
    Tie,
}

impl ApportionError {
    pub fn code(&self) -> ErrorCode {
        match self {
            ApportionError::InvalidArgument(_) => ErrorCode::Invalid,
            ApportionError::Infeasible { .. } => ErrorCode::Infeasible,
            ApportionError::Tie(_) | ApportionError::BoundaryDivisor { .. } => ErrorCode::Tie,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ApportionError::InvalidArgument(msg.into())
    }
}
