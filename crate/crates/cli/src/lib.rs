//! Command-line front end for `decoh-core`.

pub mod app;
pub mod spec_file;

pub use app::{run, Cli, CliError, Exit};
pub use spec_file::{parse_generator_spec, SpecParseError};
