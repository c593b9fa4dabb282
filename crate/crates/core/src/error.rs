use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Param(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported spec: {0}")]
    Unsupported(String),
    #[error("mapping error: {0}")]
    Mapping(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("{0}")]
    Check(String),
}

impl Error {
    /// Short machine-readable code, used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Param(_) => "E_PARAM",
            Error::Range(_) => "E_RANGE",
            Error::InvalidInput(_) => "E_INPUT",
            Error::Parse { .. } => "E_PARSE",
            Error::Unsupported(_) => "E_UNSUPPORTED",
            Error::Mapping(_) => "E_MAPPING",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::Budget(_) => "E_BUDGET",
            Error::Internal(_) => "E_INTERNAL",
            Error::Check(_) => "E_CHECK",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}
