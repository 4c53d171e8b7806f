use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit `{0}` appears more than once")]
    DuplicateQubit(String),

    #[error("unknown qubit `{0}`")]
    UnknownQubit(String),

    #[error("{what}: requested {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),

    #[error("states are defined on different registers")]
    MismatchedRegisters,

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("file index {index} out of range 1..={files}")]
    IndexOutOfRange { index: usize, files: usize },

    #[error("bell links do not meet at the measured qubits: {0}")]
    EndpointMismatch(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
