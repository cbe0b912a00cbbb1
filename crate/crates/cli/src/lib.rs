//! Library side of the `coxmap` command: the JSON problem document and the
//! subcommands that act on it.

pub mod commands;
pub mod document;

pub use commands::{run, Command, Outcome, RunOptions, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION};
pub use document::{InputError, ProblemDocument};
