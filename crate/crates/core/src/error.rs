use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected} qubits, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("registers overlap: {0}")]
    Overlap(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("duplicate register `{0}`")]
    DuplicateRegister(String),

    #[error("{qubits} qubits exceeds the dense simulation cap of {cap}")]
    TooManyQubits { qubits: usize, cap: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid Pauli word `{0}`")]
    InvalidPauli(String),

    #[error("malformed PVM: {0}")]
    MalformedPvm(String),

    #[error("sampled outcome {0} has vanishing probability")]
    ImpossibleOutcome(u64),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("strategy has no measurement for question {0}")]
    MissingPvm(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("oracle refused call: {0}")]
    OracleRefused(String),

    #[error("invalid parameter `{name}`: {msg}")]
    InvalidParameter { name: &'static str, msg: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
