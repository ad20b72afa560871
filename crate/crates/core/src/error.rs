use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("inverse of zero in a quadratic field")]
    ZeroInverse,

    #[error("matrix {0:?} has no real eigenvalue > 1 (needs det 1 and trace > 2)")]
    DegenerateMatrix([[i64; 2]; 2]),

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("length bounds are not available for {0}")]
    UnsupportedGroup(String),

    #[error("vertex {vertex}: point sits on a tile boundary along the height axis")]
    Boundary { vertex: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { key: key.into(), msg: msg.into() }
    }
}
