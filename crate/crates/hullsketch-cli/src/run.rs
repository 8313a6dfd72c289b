//! End-to-end run: stream points through the selected algorithm once,
//! optionally tracking the potential against a reference, then assemble the
//! report.

use std::time::Instant;

use hullsketch::oracles::measured_factor;
use hullsketch::potential::{PotentialTrace, Reference};
use hullsketch::{Coreset, Ellipsoid, Point, ScaleDependent, ScaleIndependent};

use crate::config::{Mode, ReferenceSpec, RunConfig};
use crate::error::CliError;
use crate::report::{
    CoresetReport, EllipsoidReport, LawReport, RunReport, VerificationSummary,
};
use crate::stream::{read_matrix_csv, PointReader};

/// Probe directions for --check-factor, beyond the axis endpoints the
/// oracle always includes. Fixed so identical configurations measure
/// identical factors.
const CHECK_FACTOR_DIRS: usize = 500;

fn build_reference(spec: &ReferenceSpec, dim: usize) -> Result<Reference, CliError> {
    match spec {
        ReferenceSpec::Ball(radius) => Ok(Reference::ball(dim, *radius)?),
        ReferenceSpec::MatrixFile(path) => {
            let m = read_matrix_csv(path)?;
            if m.nrows() != dim {
                return Err(CliError::Config {
                    reason: format!(
                        "reference matrix is {}x{} but the stream has dimension {dim}",
                        m.nrows(),
                        m.ncols()
                    ),
                });
            }
            let e = Ellipsoid::new(m).map_err(|err| CliError::Config {
                reason: format!("reference matrix rejected: {err}"),
            })?;
            Ok(Reference::new(e))
        }
    }
}

/// Potential bookkeeping shared by both algorithm modes: a trace row per
/// ingested point and a running covering flag for the verification gate.
struct Tracker {
    trace: PotentialTrace,
    covering: bool,
}

impl Tracker {
    fn record(&mut self, state: &Ellipsoid, x: &Point) -> Result<(), CliError> {
        self.covering = self.covering
            && self
                .trace
                .reference()
                .expect("tracker owns a live trace")
                .covers(x)?;
        self.trace.record(state, x)?;
        Ok(())
    }
}

pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let mut reader = PointReader::open(&config.input, config.format, config.dim)?;
    let first = match reader.next() {
        Some(point) => point?,
        None => return Err(CliError::Numeric(hullsketch::Error::EmptyStream)),
    };
    let dim = first.len();

    let mut kept_stream: Vec<Point> = Vec::new();
    let mut report = match config.mode {
        Mode::ScaleDependent => {
            let mut state = ScaleDependent::new(dim, config.r.expect("validated"))?;
            // The state predates the stream, so the trace starts at t = 0
            // with no point weight yet.
            let mut tracker = match &config.reference {
                Some(spec) => {
                    let reference = build_reference(spec, dim)?;
                    Some(Tracker {
                        trace: PotentialTrace::begin(reference, state.ellipsoid(), 0, 0.0)?,
                        covering: true,
                    })
                }
                None => None,
            };
            let feed = |state: &mut ScaleDependent,
                            tracker: &mut Option<Tracker>,
                            kept: &mut Vec<Point>,
                            x: Point|
             -> Result<(), CliError> {
                state.ingest(&x)?;
                if let Some(t) = tracker.as_mut() {
                    t.record(state.ellipsoid(), &x)?;
                }
                if config.check_factor {
                    kept.push(x);
                }
                Ok(())
            };
            feed(&mut state, &mut tracker, &mut kept_stream, first)?;
            for point in reader.by_ref() {
                feed(&mut state, &mut tracker, &mut kept_stream, point?)?;
            }
            let res = state.result()?;
            let primal = res.ellipsoid.clone();
            let reported = if config.dual {
                primal.polar()?
            } else {
                primal.clone()
            };
            let mut report = base_report(config, dim, res.steps, res.accepted, res.max_norm_seen);
            report.alpha_bound = Some(res.alpha_bound);
            report.ellipsoid = Some(EllipsoidReport::from_dense(&reported)?);
            finish_tracking(config, &mut report, tracker)?;
            measure_factor(config, &mut report, &primal, &kept_stream)?;
            report
        }
        Mode::ScaleIndependent => {
            let mut state = ScaleIndependent::new(&first, config.xi.expect("validated"))?;
            // The state is born from the first point, so the trace starts
            // at t = 1 with that point's reference weight.
            let mut tracker = match &config.reference {
                Some(spec) => {
                    let reference = build_reference(spec, dim)?;
                    let q0 = reference.weighted_norm_sq(&first)?;
                    Some(Tracker {
                        covering: reference.covers(&first)?,
                        trace: PotentialTrace::begin(
                            reference,
                            &state.ellipsoid().to_ellipsoid()?,
                            1,
                            q0,
                        )?,
                    })
                }
                None => None,
            };
            if config.check_factor {
                kept_stream.push(first);
            }
            for point in reader.by_ref() {
                let x = point?;
                state.ingest(&x)?;
                if let Some(t) = tracker.as_mut() {
                    t.record(&state.ellipsoid().to_ellipsoid()?, &x)?;
                }
                if config.check_factor {
                    kept_stream.push(x);
                }
            }
            let res = state.result()?;
            let primal = res.ellipsoid.to_ellipsoid()?;
            let mut report = base_report(config, dim, res.steps, res.accepted, res.max_norm);
            report.alpha_bound = Some(res.alpha_bound);
            report.alpha_bound_adjusted = Some(res.alpha_bound_adjusted);
            report.ellipsoid = Some(if config.dual {
                EllipsoidReport::from_dense(&primal.polar()?)?
            } else {
                EllipsoidReport::from_svd(&res.ellipsoid)
            });
            finish_tracking(config, &mut report, tracker)?;
            measure_factor(config, &mut report, &primal, &kept_stream)?;
            report
        }
        Mode::Coreset => {
            let mut state = Coreset::new(
                dim,
                config.r.expect("validated"),
                config.xi.expect("validated"),
            )?;
            let mut t = 0usize;
            state.ingest(t, &first)?;
            for point in reader.by_ref() {
                t += 1;
                state.ingest(t, &point?)?;
            }
            let alpha = match state.sketch_alpha() {
                Ok(a) => Some(a),
                Err(hullsketch::Error::EmptyCoreset) => None,
                Err(other) => return Err(other.into()),
            };
            let mut report = base_report(config, dim, t + 1, state.len(), state_max_norm(&state));
            report.alpha_bound = alpha;
            report.coreset = Some(CoresetReport {
                size: state.len(),
                log_volume_gain: state.log_volume_gain(),
                size_bound: state.size_bound(),
                min_norm: state.min_norm(),
                aspect_bound: state.aspect_bound(),
                indices: state.indices().to_vec(),
                points: state.points().iter().map(|p| p.iter().copied().collect()).collect(),
            });
            report
        }
    };

    report.wall_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Largest norm among kept points; 0 when nothing was kept. The coreset
/// has no record of skipped points' norms, and its guarantees never need
/// one.
fn state_max_norm(state: &Coreset) -> f64 {
    state
        .points()
        .iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max)
}

fn base_report(
    config: &RunConfig,
    dim: usize,
    points: usize,
    accepted: usize,
    max_norm: f64,
) -> RunReport {
    RunReport {
        mode: config.mode.name().into(),
        dim,
        points,
        accepted,
        seed: config.seed,
        r: config.r,
        xi: config.xi,
        dual: config.dual,
        max_norm,
        alpha_bound: None,
        alpha_bound_adjusted: None,
        ellipsoid: None,
        coreset: None,
        measured_factor: None,
        reference: config.reference.as_ref().map(|s| s.to_string()),
        verification: None,
        trace_path: None,
        wall_ms: 0.0,
    }
}

fn finish_tracking(
    config: &RunConfig,
    report: &mut RunReport,
    tracker: Option<Tracker>,
) -> Result<(), CliError> {
    let Some(tracker) = tracker else {
        return Ok(());
    };
    if let Some(path) = &config.trace {
        let bytes = crate::report::render_trace_rows(tracker.trace.rows())?;
        std::fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        report.trace_path = Some(path.display().to_string());
    }
    if config.deep_verify {
        let verdict = tracker.trace.verify(tracker.covering, true);
        report.verification = Some(VerificationSummary {
            all_pass: verdict.all_pass(),
            covering: tracker.covering,
            laws: verdict
                .summarize()
                .into_iter()
                .map(|s| LawReport {
                    law: s.law.to_string(),
                    checks: s.checks,
                    failures: s.failures,
                    worst_slack: s.worst_slack,
                })
                .collect(),
        });
    }
    Ok(())
}

fn measure_factor(
    config: &RunConfig,
    report: &mut RunReport,
    primal: &Ellipsoid,
    points: &[Point],
) -> Result<(), CliError> {
    if !config.check_factor {
        return Ok(());
    }
    let factor = measured_factor(primal, points, CHECK_FACTOR_DIRS, config.seed)?;
    report.measured_factor = Some(factor);
    Ok(())
}
