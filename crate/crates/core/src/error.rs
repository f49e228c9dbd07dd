use thiserror::Error;

/// Errors surfaced by the library. Validation failures of decompositions are
/// reported as data (see [`crate::decomposition::ValidationReport`]), not here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("resource limit exceeded: {what} (cap {cap})")]
    Resource { what: String, cap: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn resource(what: impl Into<String>, cap: usize) -> Self {
        Error::Resource {
            what: what.into(),
            cap,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
