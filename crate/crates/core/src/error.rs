use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("wrong arity: expected {expected} coordinates, got {got}")]
    WrongArity { expected: usize, got: usize },

    #[error("weight family requires s>1 (got s={0})")]
    RequiresSGreaterOne(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A closed form or algorithm was called outside the parameter domain it is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("cumsum overflow; reduce N or s")]
    CumsumOverflow,

    #[error("prefix too short: need N >= {needed}, have {have}")]
    PrefixTooShort { needed: usize, have: usize },

    #[error("prefix exhausted before certificate; retry with N >= {needed}")]
    PrefixExhausted { needed: usize },

    #[error("box too small: radius {radius} does not contain the first {n} weights")]
    BoxTooSmall { radius: u64, n: usize },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceCap(_) | Error::CumsumOverflow => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
