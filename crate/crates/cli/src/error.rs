// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// CLI failure with its exit code: 1 for runtime errors, 2 for usage and
/// configuration errors.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<lipsqml_core::Error> for CliError {
    fn from(e: lipsqml_core::Error) -> Self {
        CliError::Runtime(e.into())
    }
}
