use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{origin}:{line}:{column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("scenario `{scenario}` violates `{invariant}`: {detail}")]
    Invalid {
        scenario: String,
        invariant: &'static str,
        detail: String,
    },
    #[error("no scenario file or built-in named `{0}`")]
    UnknownScenario(String),
    #[error("unknown or non-numeric parameter `{0}`")]
    UnknownParameter(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("scenario `{scenario}`: {source}")]
    Run {
        scenario: String,
        source: fts_core::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
