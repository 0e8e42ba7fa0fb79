use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] spamdrift::Error),
    #[error("{key}: {message}")]
    Config { key: String, message: String },
    #[error("unknown configuration keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
}

impl CliError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        CliError::Config { key: key.to_owned(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Short stable tag for the error line printed on failure.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config { .. } => "config",
            CliError::UnknownKeys(_) => "unknown-keys",
            CliError::Syntax { .. } => "config-syntax",
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
