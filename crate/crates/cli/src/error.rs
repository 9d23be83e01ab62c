use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] bglue::error::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for anything the caller can fix by changing the invocation, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        use bglue::error::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(E::Parameter(_) | E::Dimension(_) | E::Resource { .. }) => 2,
            CliError::Core(_) => 1,
        }
    }
}
