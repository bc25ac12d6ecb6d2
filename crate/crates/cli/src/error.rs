use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("ingestion error: {0}")]
    Ingest(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Ingest(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl From<cellres_core::ingest::IngestError> for CliError {
    fn from(e: cellres_core::ingest::IngestError) -> Self {
        CliError::Ingest(e.to_string())
    }
}

impl From<cellres_core::Error> for CliError {
    fn from(e: cellres_core::Error) -> Self {
        use cellres_core::Error as E;
        match e {
            E::InvalidParameter(m) => CliError::Config(m),
            E::Ingest(_) | E::Geo(_) => CliError::Ingest(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
