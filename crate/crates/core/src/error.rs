use thiserror::Error;

/// Errors raised by the group, measure and experiment layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid prime {0}: expected an odd prime >= 3")]
    InvalidPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("generator index {index} out of range for {n} generators")]
    IndexOutOfRange { index: i64, n: usize },

    #[error("size cap exceeded: predicted order {predicted} > cap {cap}")]
    CapExceeded { predicted: String, cap: u64 },

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("subgroup is not sigma-invariant")]
    NotSigmaInvariant,

    #[error("relation {0} is not odd")]
    NotOdd(String),

    #[error("relation {0} does not lie in the Frattini subgroup")]
    NotInFrattini(String),

    #[error("word {0} does not lie in the kernel")]
    NotInKernel(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("non-integral count {0}: inconsistent inputs")]
    NonIntegral(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
