use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("degree profiles do not compose: {0}")]
    ProfileMismatch(String),
    #[error("entry of degree {degree} is not realizable in the degree group")]
    DegreeMismatch { degree: String },
    #[error("invalid Galois action: {0}")]
    InvalidAction(String),
    #[error("cocycle law fails: {0}")]
    NotASemilinearAction(String),
    #[error("no element of trace one (action is not tame)")]
    DegenerateTrace,
    #[error("degree {0} is not the absolute value of an element")]
    UnrealizableDegree(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("fixed-point iteration does not contract (delta = {0})")]
    NoContraction(String),
    #[error("substitution leaves the domain of convergence: {0}")]
    DomainViolation(String),
    #[error("function {0} is not invertible on the shape")]
    NotInvertible(usize),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("singular matrix")]
    Singular,
}

impl Error {
    /// A parse error without a known location.
    pub fn parse(message: impl Into<String>) -> Error {
        Error::Parse {
            line: 0,
            column: 0,
            message: message.into(),
        }
    }
}
