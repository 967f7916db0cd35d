use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("{n} qubits exceeds the dense oracle limit of {limit}")]
    OracleSize { n: usize, limit: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("cannot compose circuits of width {left} and {right}")]
    InvalidComposition { left: usize, right: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("circuit of width {circuit} applied to a state of width {state}")]
    InvalidApplication { circuit: usize, state: usize },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("unsupported Pauli string: {0}")]
    UnsupportedString(String),
    #[error("invalid Trotter plan: {0}")]
    InvalidPlan(String),
    #[error("invalid evolution time {0}")]
    InvalidTime(f64),
    #[error("invalid protocol setup: {0}")]
    InvalidProtocol(String),
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
