use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad invocation: wrong input count, invalid parameter, search
    /// interval outside the data.
    #[error("{0}")]
    Usage(String),
    /// Data or I/O failure during the run.
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl From<recurconnect::Error> for CliError {
    fn from(e: recurconnect::Error) -> Self {
        match e {
            recurconnect::Error::EmptySearchInterval(_) | recurconnect::Error::InvalidParameter(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Runtime(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}
