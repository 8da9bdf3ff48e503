use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: requested {requested} exceeds limit {limit}")]
    Capacity { what: &'static str, requested: u64, limit: u64 },
    #[error("label {label} is outside 1..={size}")]
    OutOfRange { label: u64, size: u64 },
    #[error("node {0} has been removed from the network")]
    RemovedNode(u32),
    #[error("{0} is undefined for this network")]
    Undefined(&'static str),
    #[error("outside the domain of the closed form: {0}")]
    Domain(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
