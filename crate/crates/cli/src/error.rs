use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("optical singularity at {skipped} of {total} grid points")]
    SingularGrid { skipped: usize, total: usize },

    /// The pump frequency itself is singular, so no grid point is defined.
    #[error("at the pump frequency: {0}")]
    SingularPump(msi_core::Error),

    #[error(transparent)]
    Unstable(msi_core::Error),

    #[error("{failed} invariant(s) failed")]
    VerifyFailed { failed: usize },

    #[error(transparent)]
    Core(msi_core::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Config { .. } | CliError::Read { .. } => 2,
            CliError::SingularGrid { .. } | CliError::SingularPump(_) => 3,
            CliError::Unstable(_) => 4,
            CliError::Write { .. } | CliError::Core(_) => 5,
        }
    }
}

impl From<msi_core::Error> for CliError {
    fn from(e: msi_core::Error) -> Self {
        match e {
            msi_core::Error::UnstableSystem { .. } => CliError::Unstable(e),
            other => CliError::Core(other),
        }
    }
}
