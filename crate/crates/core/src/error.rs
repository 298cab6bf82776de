use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("reference set too large to enumerate: N(N-1) = {cells} exceeds the cap of {cap}; use the MCMC reference instead")]
    EnumerationCap { cells: usize, cap: usize },

    #[error("MLE may not exist (quasi-separation): {0}")]
    Separation(String),

    #[error("MLE did not converge: {0}")]
    NoConvergence(String),

    #[error("sampler frozen: {0}")]
    FrozenChain(String),

    #[error("no monotone fixed point; pure-strategy NE not guaranteed")]
    NoFixedPoint,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("corrupted state: {0}")]
    Corrupted(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Separation(_)
            | Error::NoConvergence(_)
            | Error::FrozenChain(_)
            | Error::NoFixedPoint => 4,
            _ => 3,
        }
    }
}
