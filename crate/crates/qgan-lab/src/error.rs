use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits}-qubit state")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("{n_qubits} qubits exceeds the resource cap of {cap}")]
    TooManyQubits { n_qubits: usize, cap: usize },

    #[error("control and target of a CZ gate must differ (got qubit {0})")]
    DuplicateQubit(usize),

    #[error("state has {actual} qubits, expected {expected}")]
    QubitCountMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("invalid probability vector: {context}")]
    InvalidProbabilities { context: String },

    #[error("post-selection success probability {prob:.3e} is degenerate{context}")]
    DegenerateProjection { prob: f64, context: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("shot-mode sampling produced no counts for index branch {branch} after {retries} retries")]
    EmptyBranch { branch: usize, retries: usize },

    #[error("training aborted at iteration {iteration}: {reason}")]
    TrainingAborted { iteration: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
