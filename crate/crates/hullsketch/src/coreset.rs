//! Streaming coreset for symmetric-hull directional width, with a volume
//! accounting argument bounding its size.
//!
//! The selector keeps point x_t iff ‖x_t‖ > r and x_t falls outside the
//! current inner ellipsoid; on every kept point the inner state ingests the
//! inflated copy e·x_t. Each such step multiplies the inner ellipsoid's
//! axes product (its volume, up to the unit-ball constant) by at least e,
//! because a point at factored norm c > e contributes det growth c/… ≥ e
//! after the update/clamp pair. Since the inner ellipsoid starts as the
//! ball of radius r/√d and stays inside the √d-scaled hull, the total
//! volume headroom caps |S| by `log_volume_gain()`, giving the sketch its
//! size bound without storing anything but the kept points.
//!
//! Queries answer max_{x ∈ S} |⟨x, y⟩|, an underestimate of the true
//! directional width max_{x ∈ stream} |⟨x, y⟩| that is tight up to the
//! multiplicative `alpha` reported with each answer (plus the additive
//! r·‖y‖ floor absorbed by requiring ‖x‖ > r).

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use crate::ellipsoid::{EllipsoidSvd, Point, INTERIOR_TOL};
use crate::error::{Error, Result};
use crate::scale_independent::ScaleIndependent;

/// Per-acceptance lower bound on the inner state's log axes-product gain.
/// Theory says exactly 1 (a factor e in volume); the tolerance absorbs the
/// SVD recomposition's last-bit noise.
pub const LOG_GAIN_SLACK: f64 = 1e-9;

/// One sketch answer: the measured width over kept points and the
/// multiplicative factor within which it matches the full stream.
#[derive(Clone, Copy, Debug)]
pub struct SketchAnswer {
    pub value: f64,
    pub alpha: f64,
}

/// Serializable snapshot of the kept points, their stream indices, and the
/// approximation factor the sketch guarantees.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoresetExport {
    pub indices: Vec<usize>,
    pub points: Vec<Vec<f64>>,
    pub alpha: f64,
}

/// Streaming selector: a scale-independent ellipsoid state over inflated
/// copies of the kept points, plus the kept points themselves.
pub struct Coreset {
    inner: ScaleIndependent,
    dim: usize,
    min_norm: f64,
    xi: f64,
    /// Log axes-product of the initial ball, the baseline for volume gain.
    initial_log_axes: f64,
    indices: Vec<usize>,
    kept: Vec<Point>,
    last_t: Option<usize>,
}

impl Coreset {
    /// `min_norm` (r) is the norm below which points are never kept; `xi`
    /// bounds the inner ellipsoid's aspect ratio exactly as in the
    /// scale-independent algorithm.
    pub fn new(dim: usize, min_norm: f64, xi: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "need dim >= 1".into(),
            });
        }
        if !(min_norm.is_finite() && min_norm > 0.0) {
            return Err(Error::InvalidRadius { value: min_norm });
        }
        let radius = min_norm / (dim as f64).sqrt();
        let inner = ScaleIndependent::from_ball(dim, radius, xi)?;
        let initial_log_axes = dim as f64 * radius.ln();
        Ok(Self {
            inner,
            dim,
            min_norm,
            xi,
            initial_log_axes,
            indices: Vec::new(),
            kept: Vec::new(),
            last_t: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The norm threshold r below which points are ignored.
    pub fn min_norm(&self) -> f64 {
        self.min_norm
    }

    pub fn aspect_bound(&self) -> f64 {
        self.xi
    }

    /// Stream indices of the kept points, in acceptance order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// The kept points themselves (unscaled, as they arrived).
    pub fn points(&self) -> &[Point] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    /// The inner selection ellipsoid (defined over inflated points).
    pub fn ellipsoid(&self) -> &EllipsoidSvd {
        self.inner.ellipsoid()
    }

    /// Offers point `x` with stream index `t` (indices must be strictly
    /// increasing). Returns whether the point was kept.
    pub fn ingest(&mut self, t: usize, x: &Point) -> Result<bool> {
        if let Some(last) = self.last_t {
            if t <= last {
                return Err(Error::InvalidParameter {
                    name: "t",
                    reason: format!("stream indices must increase: got {t} after {last}"),
                });
            }
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !x.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite {
                context: "coreset input point",
            });
        }
        self.last_t = Some(t);
        if x.norm() <= self.min_norm {
            return Ok(false);
        }
        if self.inner.ellipsoid().norm_of(x)? <= 1.0 + INTERIOR_TOL {
            return Ok(false);
        }
        // Selected: the inner state absorbs the e-inflated copy, which has
        // factored norm > e and therefore always counts as exterior.
        let accepted = self.inner.ingest(&(x * E))?;
        debug_assert!(accepted, "inflated copy of an exterior point was skipped");
        self.indices.push(t);
        self.kept.push(x.clone());
        Ok(true)
    }

    /// Total log volume gain of the inner ellipsoid since construction;
    /// each kept point contributes at least 1 (a factor e), so
    /// `len() <= log_volume_gain()` up to roundoff.
    pub fn log_volume_gain(&self) -> f64 {
        self.inner.ellipsoid().log_axes_product() - self.initial_log_axes
    }

    /// Closed-form reading of the same budget from the current state:
    /// d·ln(σ_max·√d / r), the gain available between the starting ball
    /// and the current circumscribing ball.
    pub fn size_bound(&self) -> f64 {
        let sigma_max = self.inner.ellipsoid().sigma()[0];
        self.dim as f64 * (sigma_max * (self.dim as f64).sqrt() / self.min_norm).ln()
    }

    fn max_kept_norm(&self) -> Result<f64> {
        self.kept
            .iter()
            .map(|x| x.norm())
            .fold(None, |acc: Option<f64>, n| {
                Some(acc.map_or(n, |a| a.max(n)))
            })
            .ok_or(Error::EmptyCoreset)
    }

    /// The multiplicative factor within which [`Self::sketch_query`]
    /// matches the full stream's directional width, from the covering
    /// guarantee of the ellipsoid grown over the kept points.
    pub fn sketch_alpha(&self) -> Result<f64> {
        let d = self.dim as f64;
        let big_r = self.max_kept_norm()?;
        let ratio = (d.sqrt() * big_r / self.min_norm).max(1.0);
        let base = 2.0 * (E / (E - 1.0)) * d * (1.0 + 4.0 * ratio.ln());
        Ok(E * 2f64.sqrt() * base.sqrt())
    }

    /// Width of the kept set in direction `y`: max |⟨x, y⟩|. The true
    /// stream width lies in [value, alpha·value + r·‖y‖].
    pub fn sketch_query(&self, y: &Point) -> Result<SketchAnswer> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        if !y.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite {
                context: "sketch query direction",
            });
        }
        let alpha = self.sketch_alpha()?;
        let value = self
            .kept
            .iter()
            .map(|x| x.dot(y).abs())
            .fold(0.0_f64, f64::max);
        Ok(SketchAnswer { value, alpha })
    }

    /// Snapshot for serialization; errors on an empty coreset since the
    /// alpha factor is undefined without kept points.
    pub fn export(&self) -> Result<CoresetExport> {
        let alpha = self.sketch_alpha()?;
        Ok(CoresetExport {
            indices: self.indices.clone(),
            points: self
                .kept
                .iter()
                .map(|x| x.iter().copied().collect())
                .collect(),
            alpha,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn starts_from_the_stated_ball() {
        let c = Coreset::new(4, 2.0, 10.0).unwrap();
        // Ball radius r/√d = 1: all semi-axes 1.
        for &s in c.ellipsoid().sigma().iter() {
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!(c.is_empty());
        assert_eq!(c.len(), 0);

        let c1 = Coreset::new(1, 1.0, 1.0).unwrap();
        assert!((c1.ellipsoid().sigma()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(
            Coreset::new(2, -1.0, 2.0),
            Err(Error::InvalidRadius { .. })
        ));
        assert!(matches!(
            Coreset::new(2, 0.0, 2.0),
            Err(Error::InvalidRadius { .. })
        ));
        assert!(Coreset::new(2, 1.0, 0.5).is_err());
        assert!(Coreset::new(0, 1.0, 2.0).is_err());
    }

    #[test]
    fn small_and_interior_points_are_skipped() {
        let mut c = Coreset::new(2, 1.0, 8.0).unwrap();
        // Below the norm threshold.
        assert!(!c.ingest(0, &dvector![0.5, 0.0]).unwrap());
        // Outside threshold and outside the ball of radius 1/√2: kept.
        assert!(c.ingest(1, &dvector![2.0, 0.0]).unwrap());
        // Inside the grown ellipsoid now (long axis ≥ 2e along e₁): skipped.
        assert!(!c.ingest(2, &dvector![1.5, 0.0]).unwrap());
        assert_eq!(c.indices(), &[1]);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn indices_must_increase() {
        let mut c = Coreset::new(2, 1.0, 8.0).unwrap();
        c.ingest(5, &dvector![2.0, 0.0]).unwrap();
        assert!(matches!(
            c.ingest(5, &dvector![0.0, 2.0]),
            Err(Error::InvalidParameter { name: "t", .. })
        ));
        assert!(matches!(
            c.ingest(3, &dvector![0.0, 2.0]),
            Err(Error::InvalidParameter { name: "t", .. })
        ));
        assert!(c.ingest(6, &dvector![0.0, 9.0]).unwrap());
    }

    #[test]
    fn every_acceptance_gains_a_factor_e_in_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut c = Coreset::new(3, 0.5, 50.0).unwrap();
        let mut prev = c.log_volume_gain();
        assert!(prev.abs() < 1e-12);
        for t in 0..200 {
            let scale = 0.1 + 2.0 * (t as f64 / 40.0).exp();
            let x = crate::generators::unit_sphere(&mut rng, 3) * scale;
            if c.ingest(t, &x).unwrap() {
                let gain = c.log_volume_gain();
                assert!(
                    gain - prev >= 1.0 - LOG_GAIN_SLACK,
                    "acceptance at t={t} gained only {}",
                    gain - prev
                );
                prev = gain;
            }
        }
        assert!(!c.is_empty());
        // The counting law: size never exceeds the volume budget.
        assert!(c.len() as f64 <= c.log_volume_gain() + 1e-6);
        assert!(c.log_volume_gain() <= c.size_bound() + 1e-6);
    }

    #[test]
    fn sketch_on_a_fully_kept_stream_is_exact() {
        // Huge aspect budget and alternating far-out axis points: the inner
        // ellipsoid stays pancake-thin off-axis, so every point is kept and
        // the sketch width equals the true width.
        let pts = vec![
            dvector![2.0, 0.0],
            dvector![0.0, 4.0],
            dvector![-8.0, 0.5],
            dvector![0.3, -16.0],
        ];
        let mut c = Coreset::new(2, 1.0, 1e6).unwrap();
        for (t, x) in pts.iter().enumerate() {
            assert!(c.ingest(t, x).unwrap(), "point {t} unexpectedly dropped");
        }
        for y in [dvector![1.0, 0.0], dvector![0.3, -0.9], dvector![1.0, 1.0]] {
            let ans = c.sketch_query(&y).unwrap();
            let exact = pts.iter().map(|x| x.dot(&y).abs()).fold(0.0, f64::max);
            assert!((ans.value - exact).abs() < 1e-12);
            assert!(ans.alpha >= 1.0);
        }
    }

    #[test]
    fn empty_coreset_refuses_queries_and_export() {
        let c = Coreset::new(2, 1.0, 4.0).unwrap();
        assert!(matches!(
            c.sketch_query(&dvector![1.0, 0.0]),
            Err(Error::EmptyCoreset)
        ));
        assert!(matches!(c.export(), Err(Error::EmptyCoreset)));
    }

    #[test]
    fn alpha_tracks_the_selected_radius_ratio() {
        let mut c = Coreset::new(2, 1.0, 100.0).unwrap();
        c.ingest(0, &dvector![2.0, 0.0]).unwrap();
        let d = 2.0_f64;
        let ratio: f64 = d.sqrt() * 2.0;
        let base = 2.0 * (E / (E - 1.0)) * d * (1.0 + 4.0 * ratio.ln());
        let want = E * 2f64.sqrt() * base.sqrt();
        let got = c.sketch_alpha().unwrap();
        assert!((got - want).abs() < 1e-12, "alpha {got}, want {want}");
    }

    #[test]
    fn export_round_trips_through_json() {
        let mut c = Coreset::new(2, 1.0, 50.0).unwrap();
        c.ingest(3, &dvector![2.5, 1.0]).unwrap();
        c.ingest(7, &dvector![-1.0, 6.0]).unwrap();
        let exported = c.export().unwrap();
        let json = serde_json::to_string(&exported).unwrap();
        let back: CoresetExport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.indices, exported.indices);
        assert_eq!(back.points, exported.points);
        assert_eq!(back.alpha.to_bits(), exported.alpha.to_bits());
    }
}
