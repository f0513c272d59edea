//! Command-line orchestration for the misinformation-detection pipeline.
//!
//! Five subcommands: `ingest`, `train`, `evaluate`, `explain`, `bench`.
//! Configuration comes from a flat TOML file of sections mirroring the core
//! types; every key has a default, and the global `--seed` / `--out` flags
//! override file values. All artifacts land in the output directory and are
//! byte-identical across reruns with the same config and seed except for
//! wall-clock fields.

pub mod commands;
pub mod config;
pub mod report;

use std::fmt;

/// Command failure carrying the process exit code.
///
/// Codes are stable and documented per command: 2 malformed input, 3
/// training error, 4 single-class evaluation split, 5 text cleans to empty,
/// 6 timing failure, 1 anything else (config, I/O).
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn general(message: impl fmt::Display) -> Self {
        CliError::new(1, message.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}
