//! Command implementations behind the `trajloop` binary.
//!
//! Every command reads from and writes to caller-supplied handles so that the
//! binary and the tests drive exactly the same code.
//!
//! Exit codes:
//!
//! | code | meaning                                                    |
//! |------|------------------------------------------------------------|
//! | 0    | success                                                    |
//! | 1    | I/O failure reading or writing a file or stream            |
//! | 2    | malformed input, stream protocol violation, or bad usage   |
//! | 3    | invalid detector configuration or synthetic spec, empty grid |
//! | 10   | `stream` in one-shot mode fired an early exit               |

pub mod analyze;
pub mod args;
pub mod stream;
pub mod sweep;
pub mod synth;

use std::io;

use thiserror::Error;
use trajloop::trace::TraceError;
use trajloop::ConfigError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_EARLY: i32 = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) | CliError::Protocol(_) => EXIT_MALFORMED,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Trace failures are input errors; a bad synthetic spec is a configuration error.
impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::BadSpec(msg) => CliError::Config(msg),
            TraceError::Io(err) => CliError::Io(err),
            other => CliError::Malformed(other.to_string()),
        }
    }
}
