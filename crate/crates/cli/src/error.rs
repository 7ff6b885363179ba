use std::fmt;
use std::process::ExitCode;

use netform::Error;

/// Failure of a command, carrying its exit code class.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    MissingInput(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::MissingInput(_) => 4,
            CliError::Other(_) => 1,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::MissingInput(m) => write!(f, "missing input: {m}"),
            CliError::Other(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => CliError::Config(m),
            Error::InvalidParams(_) | Error::UnboundedGregariousness(_) => CliError::Config(e.to_string()),
            Error::Io { .. } | Error::Csv { .. } => CliError::Io(e.to_string()),
            Error::MissingInput(p) => CliError::MissingInput(p.display().to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
