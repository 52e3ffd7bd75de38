//! File formats, configuration and the command implementations behind the
//! `specgp` binary. The algorithms live in `specgp_core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod io;

pub use config::{EvalSlice, ExperimentConfig};
pub use error::CliError;
