use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Kernel evaluated at zero separation.
    #[error("singular kernel evaluation: {0}")]
    Singularity(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A source, target or window support leaves the padded free-space grid.
    #[error("point outside padded domain: {0}")]
    DomainPad(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input error: {0}")]
    Input(String),

    #[error("parameter tuning failed: {0}")]
    Tuning(String),

    #[error("oracle did not converge: {0}")]
    Oracle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
