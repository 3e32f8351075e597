//! Command-line front end and file formats for `polyjac-core`.
//!
//! Exit codes: 0 success, 1 numerical failure or threshold breach,
//! 2 usage, I/O or parse error, 3 unsupported system.

use std::fmt;
use std::io::Write;
use std::path::Path;

pub mod args;
mod commands;
pub mod formats;
pub mod report;
pub mod suite;

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

/// A command failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::usage(format!("{}: {err}", path.display()))
    }

    /// Maps a library error raised by numerical work.
    pub fn numeric(err: polyjac_core::Error) -> Self {
        use polyjac_core::Error;
        let code = match err {
            Error::UnsupportedSystem(_) => EXIT_UNSUPPORTED,
            Error::InvalidSpec(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self::new(code, err.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

/// Runs a parsed command line, writing the report to `out` and diagnostics
/// to `err`. Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        args::Command::Verify(a) => commands::verify(&a, out),
        args::Command::Solve(a) => commands::solve(&a, out),
        args::Command::Jacobian(a) => commands::jacobian(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.code
        }
    }
}
