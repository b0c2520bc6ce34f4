use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Core(#[from] graphonkit_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    /// 2 for failed claims, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 2,
            _ => 1,
        }
    }
}
