use thiserror::Error;

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const BUDGET: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] horizon_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use horizon_core::Error as E;
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Core(E::Budget { .. }) => exit::BUDGET,
            CliError::Core(E::Domain(_) | E::UnknownSpec(_) | E::SettingMismatch(_)) => {
                exit::CONFIG
            }
            CliError::Core(_) | CliError::Io { .. } | CliError::Csv(_) => exit::FAILURE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
