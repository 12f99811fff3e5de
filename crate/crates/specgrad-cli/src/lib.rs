//! Command-line companion to `specgrad-core`: benchmark grid,
//! performance profiles, trace/diagnostics analysis, and the CSV
//! formats that tie them together.
//!
//! Everything here is deterministic given the flags and the seed;
//! re-running a command overwrites its outputs byte for byte. All
//! floating-point values in data files are printed with 17 significant
//! digits so they round-trip through `f64` parsing exactly.

#![deny(missing_docs)]

pub mod bench;
pub mod csvio;
pub mod diagnose;
pub mod profile;

use std::fmt;
use std::path::PathBuf;

/// Errors surfaced by the command-line layer.
///
/// [`CliError::Usage`] and everything growing out of bad inputs map to
/// exit code 64; I/O problems map to exit code 1.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, malformed grammar, or an invalid combination.
    Usage(String),
    /// The core library rejected the configuration.
    Core(specgrad_core::Error),
    /// An input file exists but its content is not understood.
    Format {
        /// File being parsed.
        path: PathBuf,
        /// What went wrong, with a line number where available.
        reason: String,
    },
    /// Reading or writing a file failed.
    Io {
        /// File being accessed.
        path: PathBuf,
        /// The underlying error.
        source: std::io::Error,
    },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Format { path, reason } => {
                write!(f, "{}: {reason}", path.display())
            }
            CliError::Io { path, source } => {
                write!(f, "{}: {source}", path.display())
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<specgrad_core::Error> for CliError {
    fn from(e: specgrad_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            _ => 64,
        }
    }
}

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, CliError>;
