//! Experiment harness for quantum expanders: seeded sweeps, the spectrum
//! collapse figure, file formats and the `qexpander` command line.

pub mod cli;
pub mod collapse;
pub mod config;
pub mod error;
pub mod formats;
pub mod sweep;

pub use error::{CliError, Result};
