use std::path::PathBuf;

use sbpcg_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// `config` or `numerical`.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) | CliError::Io { .. } => "config",
            CliError::Core(e) => match e {
                Error::Singular { .. } | Error::Asymmetric { .. } | Error::NonFinite { .. } | Error::NewtonFailure { .. } => "numerical",
                _ => "config",
            },
        }
    }

    /// 2 for configuration errors, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "numerical" => 3,
            _ => 2,
        }
    }
}
