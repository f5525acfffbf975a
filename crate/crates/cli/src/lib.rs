//! Command-line front end for `mukai-core`: JSON documents in, deterministic reports out.

pub mod commands;
pub mod document;

pub use commands::{run, Cli, Command};
pub use document::{parse_rows, parse_vector, Document};
