use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("profile has no users")]
    EmptyProfile,

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("user {0} has no preference")]
    MissingPreference(usize),

    #[error("user {0} has no preference pair")]
    MissingPreferencePair(usize),

    #[error("user {index} has weight {weight}, but this game requires unit weights")]
    NonUnitWeight { index: usize, weight: f64 },

    #[error("cannot rescale weights to integers: {0}")]
    WeightRescale(String),

    #[error("mechanism `{mechanism}` cannot be used here: {reason}")]
    Mismatch { mechanism: String, reason: String },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("invalid profile at `{path}`: {reason}")]
    InvalidProfile { path: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
