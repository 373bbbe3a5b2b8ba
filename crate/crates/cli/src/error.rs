use su11_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("infeasible point: {0}")]
    Infeasible(String),
    #[error("oracle validation failed for: {0}")]
    ValidationFailed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::ValidationFailed(_) => 4,
            CliError::Io(_) | CliError::Core(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Infeasible(msg) => CliError::Infeasible(msg),
            CoreError::ZeroNorm { .. } => CliError::Infeasible(e.to_string()),
            CoreError::Domain(_) | CoreError::Range(_) | CoreError::InvalidSpec(_) | CoreError::Dimension(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
