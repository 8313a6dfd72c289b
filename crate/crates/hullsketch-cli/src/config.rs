//! Flag parsing and validation into a run configuration.
//!
//! Everything that can be rejected without reading the stream is rejected
//! here, so downstream errors are genuinely about the data or the numerics.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Grow from a promised inner ball of radius r.
    ScaleDependent,
    /// Bootstrap from the first point under an aspect-ratio cap ξ.
    ScaleIndependent,
    /// Select a coreset of stream indices supporting width queries.
    Coreset,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::ScaleDependent => "scale-dependent",
            Mode::ScaleIndependent => "scale-independent",
            Mode::Coreset => "coreset",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One point per line, comma-separated decimals.
    Csv,
    /// One JSON array of numbers per line.
    Jsonl,
}

/// Reference ellipsoid J* for potential tracking.
#[derive(Clone, Debug)]
pub enum ReferenceSpec {
    Ball(f64),
    MatrixFile(PathBuf),
}

impl std::fmt::Display for ReferenceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReferenceSpec::Ball(r) => write!(f, "ball:{r}"),
            ReferenceSpec::MatrixFile(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Raw command line. Cross-flag rules live in [`Cli::into_config`], not in
/// clap, so they exit with the configuration code instead of the usage one.
#[derive(Parser, Debug)]
#[command(
    name = "hullsketch",
    version,
    about = "Streaming outer ellipsoidal approximation of a symmetric convex hull"
)]
pub struct Cli {
    /// Algorithm to run.
    #[arg(long, value_enum)]
    pub mode: Mode,

    /// Input stream file.
    #[arg(long)]
    pub input: PathBuf,

    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Expected point dimension; inferred from the first row when omitted.
    #[arg(long)]
    pub d: Option<usize>,

    /// Inner-ball radius promise (scale-dependent) or minimum kept norm
    /// (coreset).
    #[arg(long)]
    pub r: Option<f64>,

    /// Aspect-ratio cap, at least 1 (scale-independent, coreset).
    #[arg(long)]
    pub xi: Option<f64>,

    /// Report the polar of the final ellipsoid: an inner approximation of
    /// the polar body, with the sandwich direction flipped.
    #[arg(long)]
    pub dual: bool,

    /// Write a per-step potential trace (JSON lines) to this path.
    /// Requires --reference.
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Reference ellipsoid J* for potential tracking: "ball:R" or a path to
    /// a CSV matrix file (d rows of d comma-separated numbers).
    #[arg(long)]
    pub reference: Option<String>,

    /// Seed for all sampled checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Verify every recorded potential law, including the quadratic-cost
    /// pairwise bound. Requires --reference.
    #[arg(long)]
    pub deep_verify: bool,

    /// Measure the true approximation factor of the final ellipsoid against
    /// the stream: exact hull gauges by LP at the axis endpoints plus 500
    /// seeded boundary directions. Reads the whole stream into memory.
    #[arg(long)]
    pub check_factor: bool,

    /// Write the report to this path instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Validated configuration: mode-required parameters present, exactly one
/// input source, numeric flags in range.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub input: PathBuf,
    pub format: Format,
    pub dim: Option<usize>,
    pub r: Option<f64>,
    pub xi: Option<f64>,
    pub dual: bool,
    pub trace: Option<PathBuf>,
    pub reference: Option<ReferenceSpec>,
    pub seed: u64,
    pub deep_verify: bool,
    pub check_factor: bool,
    pub out: Option<PathBuf>,
}

fn config_err(reason: impl Into<String>) -> CliError {
    CliError::Config {
        reason: reason.into(),
    }
}

fn infer_format(path: &std::path::Path) -> Result<Format, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Format::Csv),
        Some("jsonl") | Some("ndjson") => Ok(Format::Jsonl),
        _ => Err(config_err(format!(
            "cannot infer format from '{}'; pass --format csv|jsonl",
            path.display()
        ))),
    }
}

fn parse_reference(raw: &str) -> Result<ReferenceSpec, CliError> {
    if let Some(radius) = raw.strip_prefix("ball:") {
        let radius: f64 = radius
            .parse()
            .map_err(|_| config_err(format!("reference 'ball:{radius}' is not a number")))?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(config_err(format!(
                "reference ball radius must be positive and finite, got {radius}"
            )));
        }
        return Ok(ReferenceSpec::Ball(radius));
    }
    Ok(ReferenceSpec::MatrixFile(PathBuf::from(raw)))
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let format = match self.format {
            Some(f) => f,
            None => infer_format(&self.input)?,
        };
        if let Some(d) = self.d {
            if d == 0 {
                return Err(config_err("--d must be at least 1"));
            }
        }
        if let Some(r) = self.r {
            if !(r.is_finite() && r > 0.0) {
                return Err(config_err(format!(
                    "--r must be positive and finite, got {r}"
                )));
            }
        }
        if let Some(xi) = self.xi {
            if !(xi.is_finite() && xi >= 1.0) {
                return Err(config_err(format!("--xi must be at least 1, got {xi}")));
            }
        }
        match self.mode {
            Mode::ScaleDependent => {
                if self.r.is_none() {
                    return Err(config_err("scale-dependent mode requires --r"));
                }
                if self.xi.is_some() {
                    return Err(config_err("--xi is not used by scale-dependent mode"));
                }
            }
            Mode::ScaleIndependent => {
                if self.xi.is_none() {
                    return Err(config_err("scale-independent mode requires --xi"));
                }
                if self.r.is_some() {
                    return Err(config_err("--r is not used by scale-independent mode"));
                }
            }
            Mode::Coreset => {
                if self.r.is_none() || self.xi.is_none() {
                    return Err(config_err("coreset mode requires both --r and --xi"));
                }
                for (set, flag) in [
                    (self.dual, "--dual"),
                    (self.trace.is_some(), "--trace"),
                    (self.reference.is_some(), "--reference"),
                    (self.deep_verify, "--deep-verify"),
                    (self.check_factor, "--check-factor"),
                ] {
                    if set {
                        return Err(config_err(format!(
                            "{flag} applies to the ellipsoid algorithms, not coreset mode"
                        )));
                    }
                }
            }
        }
        let reference = self.reference.as_deref().map(parse_reference).transpose()?;
        if self.trace.is_some() && reference.is_none() {
            return Err(config_err("--trace requires --reference"));
        }
        if self.deep_verify && reference.is_none() {
            return Err(config_err("--deep-verify requires --reference"));
        }
        if reference.is_some() && self.trace.is_none() && !self.deep_verify {
            return Err(config_err(
                "--reference without --trace or --deep-verify has no effect",
            ));
        }
        Ok(RunConfig {
            mode: self.mode,
            input: self.input,
            format,
            dim: self.d,
            r: self.r,
            xi: self.xi,
            dual: self.dual,
            trace: self.trace,
            reference,
            seed: self.seed,
            deep_verify: self.deep_verify,
            check_factor: self.check_factor,
            out: self.out,
        })
    }
}
