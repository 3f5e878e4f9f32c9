use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid velocity node count {0}: need an even count of at least 2")]
    InvalidNodeCount(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tableau classification failed: {0}")]
    Classification(String),
    #[error("stencil needs {needed} ghost cells, grid has {available}")]
    InsufficientGhosts { needed: usize, available: usize },
    #[error("unsupported order {0}")]
    UnsupportedOrder(usize),
    #[error("one-sided stencil needs {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("non-finite value in {what} at t = {time}")]
    NonFinite { what: String, time: f64 },
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by the numerics rather than the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem(_) | Error::NonFinite { .. } | Error::Classification(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
