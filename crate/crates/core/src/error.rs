use thiserror::Error;

/// Library-wide error taxonomy.
///
/// `Size` covers length/shape violations (non-power-of-two lengths,
/// mismatched dimensions), `Domain` covers parameter values outside their
/// mathematical domain, and `Config` covers structurally infeasible
/// configurations (e.g. a margin that leaves no good indices).
#[derive(Debug, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn size(msg: impl Into<String>) -> Self {
        Error::Size(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
