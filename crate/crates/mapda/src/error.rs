use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("brute-force oracle supports at most {limit} items, instance has {items}")]
    OracleLimit { items: usize, limit: usize },
    #[error("invalid knapsack solution: {0}")]
    InvalidSolution(String),
    #[error("non-uniform fill: {0}")]
    NonUniformFill(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("symbol {0} does not occur in the array")]
    UnknownSymbol(u32),
    #[error("invalid array: {0}")]
    InvalidArray(String),
    #[error("degenerate channel: {0}")]
    ChannelDegeneracy(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn constraint(msg: impl Into<String>) -> Error {
    Error::Constraint(msg.into())
}
