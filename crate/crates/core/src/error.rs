use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classes used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Verification,
    Resource,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("prime-field moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("modulus {p} too small for degree bound {degree}")]
    ModulusTooSmall { p: u64, degree: u64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("gate g{gate}: {msg}")]
    InvalidCircuit { gate: usize, msg: String },
    #[error("variable x{0} is unbound")]
    Unbound(usize),
    #[error("division by zero in cdiv gate g{0}")]
    DivisionByZero(usize),
    #[error("resource ceiling exceeded: {0}")]
    ResourceCap(String),
    #[error("wiring mismatch: {0}")]
    Wiring(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("width bound exceeded: {0}")]
    Overflow(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::ResourceCap(_) => ErrorClass::Resource,
            Error::Verification(_) | Error::Internal(_) => ErrorClass::Verification,
            _ => ErrorClass::Input,
        }
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub fn invalid(gate: usize, msg: impl Into<String>) -> Self {
        Error::InvalidCircuit { gate, msg: msg.into() }
    }
}
