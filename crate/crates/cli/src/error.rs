use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("diagnostics failed: {0}")]
    Diagnostics(String),
    #[error(transparent)]
    Core(asbm_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl From<asbm_core::Error> for CliError {
    fn from(e: asbm_core::Error) -> Self {
        use asbm_core::Error as E;
        match e {
            E::Infeasible(m) => CliError::Infeasible(m),
            E::InvalidParameter(m) => CliError::Usage(m),
            e @ (E::Parse { .. } | E::NodeOutOfRange { .. } | E::SelfLoop(_) | E::LabelGap(_) | E::LabelOutOfRange { .. }) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit status: 2 usage, 3 infeasible generation, 4 diagnostics.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Diagnostics(_) => 4,
            _ => 1,
        }
    }
}
