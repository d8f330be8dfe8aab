//! Command-line front end for schoolnet: trajectory ingestion, scene
//! generation, estimation runs and index export.

pub mod config;
pub mod emit;
pub mod error;
pub mod format;
pub mod ingest;
pub mod run;

pub use config::{Emit, InputSource, RunConfig};
pub use error::{CliError, Result};
