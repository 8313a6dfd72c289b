//! CLI error type and its process exit codes.
//!
//! Codes: 0 success; 2 input trouble (unreadable file, malformed row,
//! inconsistent dimensions, empty stream); 3 numeric failure inside the
//! algorithms or oracles; 4 configuration rejected before any work started.
//! Argument-syntax errors reported by the flag parser also exit with 2.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {reason}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{}:{line}: point has {got} coordinates, expected {expected}", path.display())]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("configuration: {reason}")]
    Config { reason: String },
    #[error(transparent)]
    Numeric(#[from] hullsketch::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::DimensionMismatch { .. } => 2,
            CliError::Config { .. } => 4,
            // An empty stream is an input problem, not a numerical one: the
            // run never got far enough to do arithmetic.
            CliError::Numeric(hullsketch::Error::EmptyStream) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_partition_the_variants() {
        let io = CliError::Io {
            path: "x".into(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "gone"),
        };
        assert_eq!(io.exit_code(), 2);
        let parse = CliError::Parse {
            path: "x".into(),
            line: 3,
            reason: "bad".into(),
        };
        assert_eq!(parse.exit_code(), 2);
        let dim = CliError::DimensionMismatch {
            path: "x".into(),
            line: 2,
            expected: 3,
            got: 2,
        };
        assert_eq!(dim.exit_code(), 2);
        let config = CliError::Config {
            reason: "bad".into(),
        };
        assert_eq!(config.exit_code(), 4);
        assert_eq!(
            CliError::Numeric(hullsketch::Error::EmptyStream).exit_code(),
            2
        );
        assert_eq!(
            CliError::Numeric(hullsketch::Error::ZeroFirstPoint).exit_code(),
            3
        );
    }
}
