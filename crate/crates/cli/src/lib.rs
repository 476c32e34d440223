//! Batch front end for the twinbeam simulator.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or validation error,
//! 3 integration (quadrature) failure, 4 truncation/coverage failure.

// Validation guards are written as `if !(x > 0)` so that NaN inputs are
// rejected along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::path::PathBuf;

use twinbeam::ErrorFamily;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {key}: {reason}")]
    Usage { key: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] twinbeam::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e.family() {
                ErrorFamily::Validation => 2,
                ErrorFamily::Integration => 3,
                ErrorFamily::Truncation => 4,
            },
        }
    }
}

/// Either a structured CLI error or a clap parse outcome (which includes
/// --help/--version, reported with exit code 0).
#[derive(Debug)]
pub enum CliErrorOrExit {
    Clap(clap::Error),
    Cli(CliError),
}

/// Parse arguments (plus optional config file) into a resolved run.
pub fn parse_config<I, S>(args: I) -> Result<config::RunConfig, CliErrorOrExit>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = config::Cli::try_parse_from(args).map_err(CliErrorOrExit::Clap)?;
    config::resolve(cli).map_err(CliErrorOrExit::Cli)
}

/// Full run: parse, execute, write the output file. Returns the path
/// written.
pub fn run<I, S>(args: I) -> Result<PathBuf, CliErrorOrExit>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let run_config = parse_config(args)?;
    commands::run_to_file(&run_config).map_err(CliErrorOrExit::Cli)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_families() {
        let usage = CliError::Usage {
            key: "x".into(),
            reason: "bad".into(),
        };
        assert_eq!(usage.exit_code(), 2);
        assert_eq!(
            CliError::Core(twinbeam::Error::InvalidDimension).exit_code(),
            2
        );
        assert_eq!(
            CliError::Core(twinbeam::Error::Integration {
                achieved: 1.0,
                requested: 1e-9,
                intervals: 10
            })
            .exit_code(),
            3
        );
        assert_eq!(
            CliError::Core(twinbeam::Error::Truncation {
                tail: 1.0,
                limit: 1e-12
            })
            .exit_code(),
            4
        );
        assert_eq!(
            CliError::Core(twinbeam::Error::SpanCoverage {
                missing: 1.0,
                limit: 1e-4
            })
            .exit_code(),
            4
        );
    }
}
