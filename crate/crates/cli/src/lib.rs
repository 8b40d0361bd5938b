//! Command-line front end: `gdid estimate`, `gdid pretrends` and
//! `gdid simulate`.
//!
//! Machine output is a single JSON document on standard output; progress
//! and interpretation text go to standard error. Exit code 0 means success,
//! 2 an input or validation error, 3 a numerical failure.

pub mod args;
pub mod interpret;
pub mod report;
mod run;

pub use interpret::{render_interpretation, Direction, Labels};
pub use run::{main_with_args, run, EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK};
