//! Scenario-driven front end for `shockcost-core`: reads JSON scenarios,
//! runs one command and writes `results.json` plus CSV tables and an
//! optional SVG diagram.

pub mod commands;
pub mod dto;
pub mod error;
pub mod format;
pub mod scenario;
pub mod svg;

pub use commands::{execute, Options};
pub use error::{CliError, CliResult};
pub use scenario::{Command, Scenario};
