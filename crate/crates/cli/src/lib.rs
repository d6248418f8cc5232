//! Library side of the `rheight` command: parsing, analysis commands, JSON and SVG output.

pub mod commands;
pub mod parse;
pub mod report;
pub mod svg;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "RHEIGHT_THREADS";

pub use commands::{analyze, Analysis, CliError, Options, Output};
pub use parse::{parse_expression, render, InputExpr, ParseError};
