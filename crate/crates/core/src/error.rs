use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported field size {0}: q must be an odd prime power")]
    UnsupportedField(u64),

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(u32, u32),

    #[error("gcd of two zero polynomials is undefined")]
    ZeroGcd,

    #[error("{0} is not a unit modulo {1}")]
    NotUnit(String, String),

    #[error("modulus must be monic: {0}")]
    NotMonic(String),

    #[error("polynomial {0} is reducible")]
    Reducible(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("precision exhausted: coefficient of degree {needed} requested, series known only down to degree {known}")]
    Precision { needed: i64, known: i64 },

    #[error("work budget exceeded: {needed} > {budget} ({what})")]
    Budget {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("graph construction failed: {0}")]
    Construction(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
