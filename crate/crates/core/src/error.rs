use thiserror::Error;

use crate::poly::RingTag;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a supported prime (need 2 <= p <= 7)")]
    BadPrime(u32),
    #[error("c = {c} must be >= 1 and divisible by p - 1 = {}", .p - 1)]
    BadEmbedding { p: u32, c: u64 },
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("characteristic mismatch: {0} vs {1}")]
    CharMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("divisor is not monic in the second variable")]
    NotMonic,
    #[error("value of zero requested where a finite value is required")]
    ZeroValue,
    #[error("polynomial support {size} exceeds budget {budget}")]
    Budget { size: usize, budget: usize },
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown variable `{name}` at offset {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("negative exponent at offset {0}")]
    NegativeExponent(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
