use thiserror::Error;

use crate::keyspace::ReceiverSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u64),
    #[error("operands live in different fields (GF({0}) vs GF({1}))")]
    FieldMismatch(u64, u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Cauchy matrix needs {needed} distinct points but GF({p}) has only {p}")]
    FieldTooSmall { needed: usize, p: u64 },
    #[error("system has no solution")]
    NoSolution,
    #[error("invalid key configuration: {0}")]
    InvalidConfig(String),
    #[error("configuration does not have the required shape: {0}")]
    WrongShape(String),
    #[error("configuration is not symmetric")]
    NotSymmetric,
    #[error("schemes cannot be concatenated: {0}")]
    ShapeMismatch(String),
    #[error("receiver {0} cannot decode the message")]
    NotDecodable(usize),
    #[error("oracle state space {states} exceeds cap {cap}")]
    TooLarge { states: u128, cap: u64 },
    #[error("receiver {receiver} decoded a wrong message in simulation")]
    DecodeFailure { receiver: usize },
    #[error("rate tuple infeasible: {0}")]
    Infeasible(String),
    #[error("no capacity-achieving construction is known for this setting: {0}")]
    Unsolved(String),
    #[error("synthesized scheme rejected by the verifier after {escalations} field escalations")]
    VerificationFailed { escalations: u32 },
    #[error("key budget exceeded for subset {subset}: uses {used}, has {available}")]
    KeyBudget {
        subset: ReceiverSet,
        used: u64,
        available: u64,
    },
}
