//! Command-line front end for `msi-core`: configuration, sweeps, invariant
//! checks and CSV/JSON emission.

pub mod compare;
pub mod config;
pub mod cooling;
pub mod error;
pub mod output;
pub mod spectrum;
pub mod verify;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use output::OutputTarget;
