use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("property violation: {0}")]
    Violation(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Violation(_) => 3,
        }
    }
}

impl From<logpot::Error> for CliError {
    fn from(e: logpot::Error) -> Self {
        match e {
            logpot::Error::InvalidInput(m) | logpot::Error::Domain(m) => CliError::Validation(m),
            logpot::Error::Violation(m) => CliError::Violation(m),
            other => CliError::Runtime(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}
