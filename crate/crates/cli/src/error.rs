use thiserror::Error;

/// Failures that end a command, each mapped to a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// bad flag, range, spec or config
    #[error("{0}")]
    Usage(String),
    /// a sufficient condition fails; the summary has already been written
    #[error("condition violated: {0}")]
    Condition(String),
    /// a deficit is negative beyond tolerance, or a self-test failed
    #[error("check failed: {0}")]
    Deficit(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Condition(_) => 3,
            CliError::Deficit(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<ineq_forge::Error> for CliError {
    fn from(e: ineq_forge::Error) -> Self {
        match e {
            ineq_forge::Error::Io(m) => CliError::Io(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
