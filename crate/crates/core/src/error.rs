use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point lies on a branch cut: {0}")]
    Branch(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("point outside the evaluator's region: {0}")]
    Region(String),
    #[error("integration path check failed: {0}")]
    Path(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("precision loss: {0}")]
    Precision(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
