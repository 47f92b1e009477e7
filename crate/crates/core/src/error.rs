use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("budget exceeded for {what}: needs {required} operations, ceiling is {ceiling}")]
    BudgetExceeded {
        what: String,
        required: BigUint,
        ceiling: u128,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u32, right: u32 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
