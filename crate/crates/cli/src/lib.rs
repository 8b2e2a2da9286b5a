//! Library surface of the `skim` command-line tool: config parsing, model
//! persistence, the command implementations, and SVG plot rendering.

pub mod commands;
pub mod config;
pub mod model_file;
pub mod svg;

use skim_core::SkimError;

/// CLI failure with its process exit code: 2 for configuration problems,
/// 3 for data problems, 4 for numeric failures.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> CliError {
        CliError::Data(msg.into())
    }

    /// A core error raised while interpreting configuration is a config
    /// error regardless of its variant.
    pub fn from_config_error(e: SkimError) -> CliError {
        CliError::Config(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<SkimError> for CliError {
    fn from(e: SkimError) -> CliError {
        match &e {
            SkimError::Parameter { .. } | SkimError::Unsupported(_) => {
                CliError::Config(e.to_string())
            }
            SkimError::Shape(_) | SkimError::Parse { .. } | SkimError::Io(_) => {
                CliError::Data(e.to_string())
            }
            SkimError::NonFinite(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}
