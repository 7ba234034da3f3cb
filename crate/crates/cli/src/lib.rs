//! Command-line front end: problem files, subcommands and report rendering.

pub mod commands;
pub mod parse;
pub mod render;

pub use commands::{run, Outcome};
