use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    /// A problem in an input file, with a human-readable position.
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] iwalab_core::Error),
}

impl CliError {
    pub fn parse(origin: &str, message: impl Into<String>) -> Self {
        CliError::Parse {
            origin: origin.to_string(),
            message: message.into(),
        }
    }

    /// 1 for an inconsistent series, 3 for precision trouble, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        use iwalab_core::Error as E;
        match self {
            CliError::Core(E::InconsistentSeries(_)) => 1,
            CliError::Core(E::PrecisionExhausted(_) | E::InsufficientDegreeCap { .. }) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
