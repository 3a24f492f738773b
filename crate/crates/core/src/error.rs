use thiserror::Error;

/// Library-wide error type. The CLI maps the variants onto exit codes:
/// config errors exit 2, regime violations exit 3, numerical failures exit 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    /// Parameters outside the physically meaningful regime, e.g. a
    /// non-positive-definite invariant or imaginary mode frequencies.
    #[error("physical regime violation: {0}")]
    Regime(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Regime(_) => 3,
            Error::Numerical(_) | Error::Index(_) | Error::Io(_) => 4,
        }
    }
}
