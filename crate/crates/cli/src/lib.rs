//! Command-line front end: data and design files, output formats, and the
//! threaded simulation driver.

pub mod cli;
pub mod dataset;
pub mod design;
pub mod error;
pub mod format;
pub mod runner;
pub mod scenario_config;
pub mod simulate;

pub use cli::run;
pub use error::{exit, CliError};
