use thiserror::Error;

use crate::torus::Basis;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid torus parameters: {0}")]
    InvalidSpec(String),
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    CapExceeded { dim: String, cap: u64 },
    #[error("operands belong to different tori")]
    SpecMismatch,
    #[error("expected an element in the {expected} basis, found {found}")]
    BasisMismatch { expected: Basis, found: Basis },
    #[error("invalid exponent vector: {0}")]
    InvalidLabel(String),
    #[error("variable index out of range: {0}")]
    InvalidVariable(String),
    #[error("supersymmetry requires at least one odd variable (n >= 1)")]
    NoOddVariables,
    #[error("label {0} is not canonical")]
    NotCanonical(String),
    #[error("label {0} is ordinary: some a_i + b_j is divisible by p")]
    Ordinary(String),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
