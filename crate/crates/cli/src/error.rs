use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config at `{field}`: {reason}")]
    ConfigInvalid { field: String, reason: String },

    #[error("i/o: {0}")]
    Io(String),

    #[error(transparent)]
    Numeric(#[from] toponogov::Error),
}

impl CliError {
    pub fn config(field: &str, reason: String) -> Self {
        CliError::ConfigInvalid { field: field.to_string(), reason }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
