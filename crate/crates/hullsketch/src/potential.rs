//! Potential instrumentation: evaluates the growth potential of a streaming
//! state against a fixed reference ellipsoid and checks every evolution law
//! as recorded data.
//!
//! For a reference matrix J* and state A_t, with M = J*·A_t⁻¹:
//!   S_t = ‖M‖_F², P_t = 2·ln|det M|, Φ_t = S_t − P_t,
//!   Q_t = max_{i≤t} ‖J*·x_i‖² over every point seen, skipped or not.
//! Each singular value σ of M contributes σ² − ln σ² ≥ 1, so Φ ≥ d, and
//! σ_max(M) ≤ √((e/(e−1))·Φ) turns the potential into a certified factor.
//!
//! Verified laws, with the named flag that enables them:
//!   always:       S_t ≤ S_u + Q_t·(P_t − P_u) for u = t−1 (all u ≤ t under
//!                 `deep`), and S_t ≤ S_{t−1} + d·Q_t.
//!   `covering`:   Φ_t ≤ Φ_{t−1} and S_t − S_{t−1} ≤ (P_t − P_{t−1})·‖J*x_t‖².
//!                 These two are theorems of the plain rank-one chain under a
//!                 covering reference; the scale-independent correction may
//!                 lawfully violate them, so they are opt-in.

use std::io::Write;

use crate::ellipsoid::{Ellipsoid, Point};
use crate::error::{Error, Result};

/// Covering slack: the reference counts as covering x when ‖J*x‖ ≤ 1 + this.
pub const COVERING_TOL: f64 = 1e-9;

/// Law slack at the reference scale (d ≤ 64); grows linearly beyond.
pub fn slack_tol(dim: usize) -> f64 {
    1e-9 * (dim as f64 / 64.0).max(1.0)
}

/// Certified bound σ_max(J*·A⁻¹) ≤ √((e/(e−1))·Φ).
pub fn sigma_max_bound(phi: f64) -> f64 {
    let e = std::f64::consts::E;
    (e / (e - 1.0) * phi).sqrt()
}

/// The fixed comparison ellipsoid E* = {x : ‖J*x‖ ≤ 1}.
#[derive(Clone, Debug)]
pub struct Reference {
    j: Ellipsoid,
}

/// One potential evaluation.
#[derive(Clone, Copy, Debug)]
pub struct Potential {
    pub s: f64,
    pub p: f64,
    pub phi: f64,
}

impl Reference {
    pub fn new(j: Ellipsoid) -> Self {
        Self { j }
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Ok(Self {
            j: Ellipsoid::ball(dim, radius)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn ellipsoid(&self) -> &Ellipsoid {
        &self.j
    }

    /// Covering test for guarantee checks: ‖J*x‖ ≤ 1 + COVERING_TOL.
    pub fn covers(&self, x: &Point) -> Result<bool> {
        Ok(self.j.norm_of(x)? <= 1.0 + COVERING_TOL)
    }

    /// ‖J*x‖², the per-point weight entering Q_t.
    pub fn weighted_norm_sq(&self, x: &Point) -> Result<f64> {
        let n = self.j.norm_of(x)?;
        Ok(n * n)
    }

    /// S, P, Φ of a state. The value depends on A only through AᵀA.
    pub fn potential(&self, a: &Ellipsoid) -> Result<Potential> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        let a_inv = a.matrix().clone().try_inverse().ok_or(Error::Singular {
            context: "potential state inverse",
            cond: f64::INFINITY,
        })?;
        let m = self.j.matrix() * a_inv;
        let s = m.norm_squared();
        let sv = crate::linalg::singular_values(&m);
        if sv.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Singular {
                context: "potential spectrum",
                cond: f64::INFINITY,
            });
        }
        let p = 2.0 * sv.iter().map(|v| v.ln()).sum::<f64>();
        let phi = s - p;
        if !phi.is_finite() {
            return Err(Error::NonFinite {
                context: "potential value",
            });
        }
        Ok(Potential { s, p, phi })
    }
}

/// One recorded step: state potential after t points plus the running
/// maximum q of ‖J*x_i‖².
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub s: f64,
    pub p: f64,
    pub phi: f64,
    pub q: f64,
}

/// The law a check instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Law {
    /// Φ_t ≤ Φ_{t−1}.
    PhiMonotone,
    /// S_t − S_{t−1} ≤ (P_t − P_{t−1})·‖J*x_t‖².
    StepBound,
    /// S_t ≤ S_u + Q_t·(P_t − P_u).
    PairBound,
    /// S_t ≤ S_{t−1} + d·Q_t.
    FrobeniusCap,
}

impl std::fmt::Display for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Law::PhiMonotone => "phi-monotone",
            Law::StepBound => "step-bound",
            Law::PairBound => "pair-bound",
            Law::FrobeniusCap => "frobenius-cap",
        })
    }
}

/// One verified inequality. `slack` is the margin by which it held;
/// negative slack beyond tolerance means `pass` is false.
#[derive(Clone, Copy, Debug)]
pub struct LawCheck {
    pub law: Law,
    pub t: usize,
    pub u: Option<usize>,
    pub slack: f64,
    pub pass: bool,
}

/// Per-law rollup for compact reporting.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct LawSummary {
    #[serde(serialize_with = "serialize_law")]
    pub law: Law,
    pub checks: usize,
    pub failures: usize,
    pub worst_slack: f64,
}

fn serialize_law<S: serde::Serializer>(law: &Law, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&law.to_string())
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub checks: Vec<LawCheck>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn summarize(&self) -> Vec<LawSummary> {
        let mut out: Vec<LawSummary> = Vec::new();
        for law in [
            Law::PhiMonotone,
            Law::StepBound,
            Law::PairBound,
            Law::FrobeniusCap,
        ] {
            let subset: Vec<&LawCheck> = self.checks.iter().filter(|c| c.law == law).collect();
            if subset.is_empty() {
                continue;
            }
            out.push(LawSummary {
                law,
                checks: subset.len(),
                failures: subset.iter().filter(|c| !c.pass).count(),
                worst_slack: subset.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min),
            });
        }
        out
    }
}

/// Recorded potential history of one run. Rows grow by one per ingested
/// point, skipped or accepted; row 0 is the state at birth. The per-step
/// series ‖J*x_t‖² is kept alongside for the step-bound law; a trace
/// rebuilt from exported rows may lack it.
#[derive(Clone, Debug)]
pub struct PotentialTrace {
    dim: usize,
    rows: Vec<TraceRow>,
    jx_sq: Option<Vec<f64>>,
    reference: Option<Reference>,
    q: f64,
}

impl PotentialTrace {
    /// Opens a trace at the state's birth: t0 = 0 and q0 = 0 for a state
    /// that predates the stream, or t0 = 1 and q0 = ‖J*x₁‖² for a state
    /// built from the first point.
    pub fn begin(reference: Reference, initial: &Ellipsoid, t0: usize, q0: f64) -> Result<Self> {
        if !(q0.is_finite() && q0 >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "q0",
                reason: format!("must be nonnegative, got {q0}"),
            });
        }
        let pot = reference.potential(initial)?;
        let dim = reference.dim();
        Ok(Self {
            dim,
            rows: vec![TraceRow {
                t: t0,
                s: pot.s,
                p: pot.p,
                phi: pot.phi,
                q: q0,
            }],
            jx_sq: Some(Vec::new()),
            reference: Some(reference),
            q: q0,
        })
    }

    /// Appends the state after ingesting x (whether or not it was accepted).
    pub fn record(&mut self, a: &Ellipsoid, x: &Point) -> Result<()> {
        let reference = self.reference.as_ref().ok_or_else(|| Error::TraceMismatch {
            reason: "trace was rebuilt from rows; recording needs the original reference".into(),
        })?;
        let jx = reference.weighted_norm_sq(x)?;
        let pot = reference.potential(a)?;
        self.q = self.q.max(jx);
        let t = self.rows.last().expect("begin pushed a row").t + 1;
        self.rows.push(TraceRow {
            t,
            s: pot.s,
            p: pot.p,
            phi: pot.phi,
            q: self.q,
        });
        self.jx_sq.as_mut().expect("recording trace").push(jx);
        Ok(())
    }

    /// Rebuilds a trace from exported rows, for offline verification.
    /// Validates shape: contiguous t, nondecreasing finite q, and the jx
    /// series (when given) one shorter than the rows.
    pub fn from_rows(dim: usize, rows: Vec<TraceRow>, jx_sq: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "must be positive".into(),
            });
        }
        for w in rows.windows(2) {
            if w[1].t != w[0].t + 1 {
                return Err(Error::TraceMismatch {
                    reason: format!("rows jump from t={} to t={}", w[0].t, w[1].t),
                });
            }
            if w[1].q < w[0].q {
                return Err(Error::TraceMismatch {
                    reason: format!("q decreases at t={}", w[1].t),
                });
            }
        }
        if rows
            .iter()
            .any(|r| !(r.s.is_finite() && r.p.is_finite() && r.phi.is_finite() && r.q.is_finite()))
        {
            return Err(Error::TraceMismatch {
                reason: "non-finite row".into(),
            });
        }
        if let Some(jx) = &jx_sq {
            if rows.is_empty() || jx.len() != rows.len() - 1 {
                return Err(Error::TraceMismatch {
                    reason: format!(
                        "jx series has {} entries for {} rows",
                        jx.len(),
                        rows.len()
                    ),
                });
            }
        }
        let q = rows.last().map(|r| r.q).unwrap_or(0.0);
        Ok(Self {
            dim,
            rows,
            jx_sq,
            reference: None,
            q,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    /// Per-step ‖J*x_t‖², aligned so entry k belongs to the transition from
    /// rows[k] to rows[k+1]. Absent on traces rebuilt without it.
    pub fn step_norms_sq(&self) -> Option<&[f64]> {
        self.jx_sq.as_deref()
    }

    pub fn reference(&self) -> Option<&Reference> {
        self.reference.as_ref()
    }

    /// Checks the evolution laws over the recorded rows. `covering` enables
    /// the two plain-chain laws (Φ-monotone and the per-step S/P bound);
    /// `deep` extends the pairwise law from consecutive rows to all pairs.
    pub fn verify(&self, covering: bool, deep: bool) -> VerificationReport {
        let tol = slack_tol(self.dim);
        let d = self.dim as f64;
        let mut checks = Vec::new();
        for k in 1..self.rows.len() {
            let prev = &self.rows[k - 1];
            let cur = &self.rows[k];
            if covering {
                checks.push(LawCheck {
                    law: Law::PhiMonotone,
                    t: cur.t,
                    u: None,
                    slack: prev.phi - cur.phi,
                    pass: prev.phi - cur.phi >= -tol,
                });
                if let Some(jx) = &self.jx_sq {
                    let slack = (cur.p - prev.p) * jx[k - 1] - (cur.s - prev.s);
                    checks.push(LawCheck {
                        law: Law::StepBound,
                        t: cur.t,
                        u: None,
                        slack,
                        pass: slack >= -tol,
                    });
                }
            }
            let cap_slack = prev.s + d * cur.q - cur.s;
            checks.push(LawCheck {
                law: Law::FrobeniusCap,
                t: cur.t,
                u: None,
                slack: cap_slack,
                pass: cap_slack >= -tol,
            });
            let lo = if deep { 0 } else { k - 1 };
            for u in lo..k {
                let base = &self.rows[u];
                let slack = base.s + cur.q * (cur.p - base.p) - cur.s;
                checks.push(LawCheck {
                    law: Law::PairBound,
                    t: cur.t,
                    u: Some(base.t),
                    slack,
                    pass: slack >= -tol,
                });
            }
        }
        VerificationReport { checks }
    }

    /// One JSON object per row, floats at full precision.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.rows {
            writeln!(
                w,
                "{{\"t\":{},\"s\":{:.16e},\"p\":{:.16e},\"phi\":{:.16e},\"q\":{:.16e}}}",
                r.t, r.s, r.p, r.phi, r.q
            )?;
        }
        Ok(())
    }
}
