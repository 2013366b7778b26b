use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, configuration key or parameter combination.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was called on input that violates its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A requested value lies outside the range an operation can produce.
    #[error("out of range: {0}")]
    Range(String),

    /// A quadrature or iteration failed to reach its accuracy target.
    #[error("accuracy target missed: {0}")]
    Accuracy(String),

    /// The solver detected a singularity (NaN or gradient above threshold).
    #[error("blow-up detected at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

/// Io error annotated with the offending path.
pub(crate) fn io_at(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}
