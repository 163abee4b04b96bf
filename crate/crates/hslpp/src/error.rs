use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] hslpp_core::Error),
    #[error("{path}:{line}: {msg}")]
    Config { path: String, line: usize, msg: String },
    #[error("invalid value for `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(key: &str, msg: impl Into<String>) -> Self {
        Error::Invalid { key: key.into(), msg: msg.into() }
    }

    /// `2` for numerical failures, `1` for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}
