//! Command-line front end for `statecert`: file formats, criterion selection,
//! report rendering.

pub mod error;
pub mod formats;
pub mod render;
pub mod run;

pub use error::{CliError, Result};
pub use run::{run_check, Kind, RunConfig, RunOutcome, RunReport};
