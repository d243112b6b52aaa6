use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("header `{0}` is not in the registered header table")]
    InvalidHeader(String),

    #[error("malformed bit string: {0}")]
    Parse(String),

    /// The dovetail scan ran out of fuel before it could certify a minimizer.
    #[error("unresolved at fuel {fuel}")]
    UnresolvedAtFuel { fuel: u64 },

    #[error("compressor `{id}` failed: {diagnostics}")]
    Compressor { id: String, diagnostics: String },

    #[error("unknown compressor `{0}`")]
    UnknownCompressor(String),

    #[error("pool precondition violated: {0}")]
    Pool(String),

    #[error("fixture invalid: {0}")]
    Fixture(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
