use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// A hypothesis of the lemma or theorem being instantiated does not hold.
    #[error("precondition failed: {}", .0.join("; "))]
    Precondition(Vec<String>),

    /// A smallness parameter lies outside its admissible window.
    #[error("{name} = {value} outside window (0, {max}){detail}")]
    Range {
        name: &'static str,
        value: String,
        max: String,
        detail: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("weight is singular at a grid node (|x| = 0 with delta = 0)")]
    Singularity,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("malformed rational '{0}'")]
    MalformedRational(String),

    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
