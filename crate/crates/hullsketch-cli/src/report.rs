//! Run report structure and its JSON rendering.
//!
//! Every float is written in scientific notation with 17 significant
//! digits, which is always enough to reproduce the exact f64 on re-parse;
//! the round-trip property is tested, not assumed. Reports are rendered as
//! a single compact JSON document with a fixed field order, so two runs of
//! the same configuration produce byte-identical output except for the
//! wall-clock field.

use std::io::Write;

use hullsketch::nalgebra::DMatrix;
use hullsketch::{Ellipsoid, EllipsoidSvd};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Matrix plus factored form of one ellipsoid E = {x : ‖Ax‖ ≤ 1}:
/// A = U·diag(1/σ)·Vᵀ with `semi_axes` = σ descending.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EllipsoidReport {
    pub matrix: Vec<Vec<f64>>,
    pub semi_axes: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl EllipsoidReport {
    pub fn from_dense(e: &Ellipsoid) -> Result<Self, CliError> {
        let svd = e.to_svd()?;
        Ok(Self {
            matrix: matrix_rows(e.matrix()),
            semi_axes: svd.sigma().iter().copied().collect(),
            u: matrix_rows(svd.u()),
            v: matrix_rows(svd.v()),
        })
    }

    pub fn from_svd(e: &EllipsoidSvd) -> Self {
        Self {
            matrix: matrix_rows(&e.matrix()),
            semi_axes: e.sigma().iter().copied().collect(),
            u: matrix_rows(e.u()),
            v: matrix_rows(e.v()),
        }
    }
}

/// Kept subset in coreset mode.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoresetReport {
    pub size: usize,
    pub log_volume_gain: f64,
    pub size_bound: f64,
    pub min_norm: f64,
    pub aspect_bound: f64,
    pub indices: Vec<usize>,
    pub points: Vec<Vec<f64>>,
}

/// One potential law's verification rollup.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LawReport {
    pub law: String,
    pub checks: usize,
    pub failures: usize,
    pub worst_slack: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub all_pass: bool,
    /// Whether the reference covered every stream point; the monotonicity
    /// laws are only claimed under a covering reference.
    pub covering: bool,
    pub laws: Vec<LawReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: String,
    pub dim: usize,
    pub points: usize,
    pub accepted: usize,
    pub seed: u64,
    pub r: Option<f64>,
    pub xi: Option<f64>,
    pub dual: bool,
    pub max_norm: f64,
    /// Certified sandwich factor; absent only for an empty coreset, which
    /// has no sketch guarantee yet.
    pub alpha_bound: Option<f64>,
    /// √2-adjusted factor of the scale-independent algorithm, the one to
    /// check hull gauges against.
    pub alpha_bound_adjusted: Option<f64>,
    /// Final ellipsoid; the polar one in dual mode; absent in coreset mode.
    pub ellipsoid: Option<EllipsoidReport>,
    pub coreset: Option<CoresetReport>,
    /// Measured true factor from --check-factor, always against the primal
    /// ellipsoid.
    pub measured_factor: Option<f64>,
    pub reference: Option<String>,
    pub verification: Option<VerificationSummary>,
    pub trace_path: Option<String>,
    /// Excluded from determinism comparisons.
    pub wall_ms: f64,
}

/// serde_json formatter writing every f64 as `{:.16e}`: one leading digit
/// plus 16 fractional digits = 17 significant digits, the count that
/// uniquely identifies any f64.
struct SciFloat;

impl serde_json::ser::Formatter for SciFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn to_sci_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFloat);
    value.serialize(&mut ser).map_err(|e| CliError::Config {
        reason: format!("report serialization failed: {e}"),
    })?;
    Ok(buf)
}

/// The report as a JSON document plus trailing newline.
pub fn render_report(report: &RunReport) -> Result<Vec<u8>, CliError> {
    let mut buf = to_sci_json(report)?;
    buf.push(b'\n');
    Ok(buf)
}

/// One JSON object per line, same float convention as the report.
pub fn render_trace_rows(rows: &[hullsketch::potential::TraceRow]) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    for row in rows {
        out.extend_from_slice(&to_sci_json(row)?);
        out.push(b'\n');
    }
    Ok(out)
}
