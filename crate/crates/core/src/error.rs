use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register `{0}` already present in layout")]
    NameCollision(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("register `{name}` has width {width}; widths must be at least 1")]
    ZeroWidth { name: String, width: usize },

    #[error("layout needs {needed} qubits but the cap is {cap}")]
    QubitCapExceeded { needed: usize, cap: usize },

    #[error("register sets overlap on `{0}`")]
    Overlap(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("isometry signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("matrix is not an isometry (deviation {0:e})")]
    NotIsometry(f64),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("prefix `{0}` has zero probability")]
    ZeroProbability(String),

    #[error("branch cap exceeded at step {step}: {branches} branches > cap {cap}")]
    BranchCapExceeded {
        step: usize,
        branches: usize,
        cap: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("oracle input {input} outside domain of width {width}")]
    OutOfDomain { input: String, width: usize },

    #[error("verifier makes quantum oracle queries; only classical-query verifiers are attackable here")]
    QuantumQueries,
}

pub type Result<T> = std::result::Result<T, Error>;
