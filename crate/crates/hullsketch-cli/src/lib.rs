//! Command-line front end for the hullsketch library: read a point stream
//! from a file, run one of the streaming algorithms over it in a single
//! forward pass, and emit a machine-readable JSON report, with optional
//! potential traces, law verification, and measured-factor oracle checks.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod stream;

use std::io::Write;

pub use config::{Cli, Format, Mode, ReferenceSpec, RunConfig};
pub use error::CliError;
pub use report::RunReport;
pub use run::run;

/// Full pipeline behind `main`: validate, run, render, deliver.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    let config = cli.into_config()?;
    let report = run(&config)?;
    let bytes = report::render_report(&report)?;
    match &config.out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    Ok(())
}
