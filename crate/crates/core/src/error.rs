use thiserror::Error;

use crate::field::Field;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),

    #[error("invalid dimensions {0:?}: every dimension must be positive")]
    InvalidDims([usize; 3]),

    #[error("index {idx:?} outside dims {dims:?}")]
    IndexOutOfRange { idx: [usize; 3], dims: [usize; 3] },

    #[error("duplicate entry at index {0:?}")]
    DuplicateEntry([usize; 3]),

    #[error("{0} is not a prime modulus")]
    NotPrime(u64),

    #[error("invalid axis {0}: expected 1, 2 or 3")]
    InvalidAxis(usize),

    #[error("invalid weighting: {0}")]
    InvalidWeighting(String),

    #[error("malformed tensor file: {0}")]
    Format(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("no admissible cover: every axis is forbidden")]
    Infeasible,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("support is not tight")]
    NotTight,

    #[error("work budget exceeded: {needed} > {budget}; {hint}")]
    BudgetExceeded { needed: u128, budget: u128, hint: String },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
