use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GhostError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("weight {k} is not in the class k = {k_eps} mod {modulus}")]
    WrongClass { k: u64, k_eps: u64, modulus: u64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("support scan for g_{n} passed the weight ceiling {ceiling}")]
    CeilingExceeded { n: u64, ceiling: u64 },
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl GhostError {
    /// Configuration errors map to exit code 1, everything else to 2.
    pub fn is_config(&self) -> bool {
        matches!(self, GhostError::InvalidConfig(_))
    }
}

pub type Result<T> = std::result::Result<T, GhostError>;
