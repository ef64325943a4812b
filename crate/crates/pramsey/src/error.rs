use pramsey_core::Error as CoreError;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed files or arguments.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A check ran and did not pass.
    #[error("verification failed: {0}")]
    Failed(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io { .. } => 2,
            CliError::Failed(_) => 1,
            CliError::Core(e) => match e.root() {
                CoreError::InvalidInput(_) => 2,
                _ => 1,
            },
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            CliError::Core(e) => e.stage(),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Invalid(_) => "invalid-input",
            CliError::Failed(_) => "verification",
            CliError::Io { .. } => "io",
            CliError::Core(e) => e.root().kind(),
        }
    }
}
