//! One-pass outer approximation when an inner radius is known up front.
//!
//! The state starts as the ball of radius r, assumed to sit inside the hull
//! of the eventual stream, and applies the rank-one minimum-volume update to
//! every point that lands outside the current ellipsoid. Interior points are
//! skipped unchanged, so a pass over n points costs O(n·d²).
//!
//! The certified approximation factor depends only on d and on how far the
//! largest point norm R exceeds r: the symmetric hull of the stream is
//! sandwiched between E_n and alpha·E_n with
//! alpha = √2·√((e/(e−1))·d·(1+4·ln(max(R/r, 1)))).

use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ellipsoid::{matrix_to_rows, rows_to_matrix, Ellipsoid, Point, INTERIOR_TOL};
use crate::error::{Error, Result};

/// Streaming state. One allocation of d² doubles plus counters; every ingest
/// is two matrix-vector products and a rank-one write.
#[derive(Clone, Debug)]
pub struct ScaleDependent {
    a: Ellipsoid,
    inner_radius: f64,
    max_norm_seen: f64,
    step: usize,
    accepted: usize,
}

/// Final summary: the ellipsoid, the certified sandwich factor, and the
/// stream statistics the factor was computed from.
#[derive(Clone, Debug)]
pub struct ScaleDependentResult {
    pub ellipsoid: Ellipsoid,
    /// conv(±stream) ⊆ alpha_bound · E_n is certified; E_n ⊇ conv(±stream)
    /// always holds.
    pub alpha_bound: f64,
    pub inner_radius: f64,
    pub max_norm_seen: f64,
    pub steps: usize,
    pub accepted: usize,
}

impl ScaleDependent {
    /// Starts from the ball of radius r, which must lie inside the symmetric
    /// hull of the stream for the factor guarantee to hold.
    pub fn new(dim: usize, inner_radius: f64) -> Result<Self> {
        let a = Ellipsoid::ball(dim, inner_radius)?;
        Ok(Self {
            a,
            inner_radius,
            max_norm_seen: 0.0,
            step: 0,
            accepted: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn ellipsoid(&self) -> &Ellipsoid {
        &self.a
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Largest Euclidean norm seen so far, counting skipped points.
    pub fn max_norm_seen(&self) -> f64 {
        self.max_norm_seen
    }

    pub fn steps(&self) -> usize {
        self.step
    }

    pub fn accepted(&self) -> usize {
        self.accepted
    }

    /// Feeds one point. Returns true when the ellipsoid changed, false when
    /// the point was already covered. The norm statistic advances either
    /// way; the ellipsoid never shrinks.
    pub fn ingest(&mut self, x: &Point) -> Result<bool> {
        let norm = self.a.norm_of(x)?;
        self.step += 1;
        self.max_norm_seen = self.max_norm_seen.max(x.norm());
        if norm <= 1.0 + INTERIOR_TOL {
            return Ok(false);
        }
        let (next, _det_ratio) = self.a.rank_one_update(x)?;
        self.a = next;
        self.accepted += 1;
        Ok(true)
    }

    /// Certified factor for the current statistics:
    /// √2·√((e/(e−1))·d·(1+4·ln(max(R/r, 1)))).
    pub fn alpha_bound(&self) -> f64 {
        let d = self.dim() as f64;
        let ratio = (self.max_norm_seen / self.inner_radius).max(1.0);
        let e = std::f64::consts::E;
        (2.0 * (e / (e - 1.0)) * d * (1.0 + 4.0 * ratio.ln())).sqrt()
    }

    pub fn result(&self) -> Result<ScaleDependentResult> {
        if self.step == 0 {
            return Err(Error::EmptyStream);
        }
        Ok(ScaleDependentResult {
            ellipsoid: self.a.clone(),
            alpha_bound: self.alpha_bound(),
            inner_radius: self.inner_radius,
            max_norm_seen: self.max_norm_seen,
            steps: self.step,
            accepted: self.accepted,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    a: Vec<Vec<f64>>,
    inner_radius: f64,
    max_norm_seen: f64,
    step: usize,
    accepted: usize,
}

impl Serialize for ScaleDependent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr {
            a: matrix_to_rows(self.a.matrix()),
            inner_radius: self.inner_radius,
            max_norm_seen: self.max_norm_seen,
            step: self.step,
            accepted: self.accepted,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ScaleDependent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = StateRepr::deserialize(deserializer)?;
        let m: DMatrix<f64> = rows_to_matrix(&repr.a).map_err(D::Error::custom)?;
        let a = Ellipsoid::new(m).map_err(D::Error::custom)?;
        if !(repr.inner_radius.is_finite() && repr.inner_radius > 0.0) {
            return Err(D::Error::custom("inner_radius must be positive"));
        }
        if !(repr.max_norm_seen.is_finite() && repr.max_norm_seen >= 0.0) {
            return Err(D::Error::custom("max_norm_seen must be nonnegative"));
        }
        Ok(Self {
            a,
            inner_radius: repr.inner_radius,
            max_norm_seen: repr.max_norm_seen,
            step: repr.step,
            accepted: repr.accepted,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellipsoid::form_rel_diff;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    #[test]
    fn starts_as_the_given_ball() {
        let s = ScaleDependent::new(3, 0.5).unwrap();
        let x = DVector::from_vec(vec![0.5, 0.0, 0.0]);
        assert_relative_eq!(s.ellipsoid().norm_of(&x).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn interior_points_are_skipped_but_counted() {
        let mut s = ScaleDependent::new(2, 1.0).unwrap();
        let before = s.ellipsoid().clone();
        let changed = s.ingest(&DVector::from_vec(vec![0.3, 0.4])).unwrap();
        assert!(!changed);
        assert_eq!(s.steps(), 1);
        assert_eq!(s.accepted(), 0);
        assert_relative_eq!(s.max_norm_seen(), 0.5, max_relative = 1e-15);
        assert_eq!(form_rel_diff(&before, s.ellipsoid()).unwrap(), 0.0);
    }

    #[test]
    fn accepted_point_lands_on_the_boundary() {
        let mut s = ScaleDependent::new(2, 1.0).unwrap();
        let x = DVector::from_vec(vec![3.0, 1.0]);
        assert!(s.ingest(&x).unwrap());
        assert_relative_eq!(s.ellipsoid().norm_of(&x).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn determinant_tracks_accumulated_ratios() {
        let mut s = ScaleDependent::new(2, 1.0).unwrap();
        let pts = [
            DVector::from_vec(vec![2.0, 0.5]),
            DVector::from_vec(vec![-1.0, 3.0]),
            DVector::from_vec(vec![0.1, 0.1]),
            DVector::from_vec(vec![4.0, -2.0]),
        ];
        let mut expected_log_det = s.ellipsoid().log_det();
        for x in &pts {
            let c = s.ellipsoid().norm_of(x).unwrap();
            if s.ingest(x).unwrap() {
                expected_log_det -= c.ln();
            }
        }
        assert_relative_eq!(s.ellipsoid().log_det(), expected_log_det, epsilon = 1e-9);
    }

    #[test]
    fn past_points_stay_covered() {
        let mut s = ScaleDependent::new(2, 0.5).unwrap();
        let pts = [
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![-3.0, 0.2]),
            DVector::from_vec(vec![0.7, -0.7]),
        ];
        for x in &pts {
            s.ingest(x).unwrap();
        }
        for x in &pts {
            assert!(s.ellipsoid().contains(x, 1e-9).unwrap());
        }
    }

    #[test]
    fn alpha_bound_formula() {
        let e = std::f64::consts::E;
        // R = r: the log term vanishes.
        let s = ScaleDependent::new(2, 1.0).unwrap();
        let mut s = s;
        s.ingest(&DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let expect = (2.0 * (e / (e - 1.0)) * 2.0).sqrt();
        assert_relative_eq!(s.alpha_bound(), expect, max_relative = 1e-14);
        // R = e²·r in d = 4: 1 + 4·ln(R/r) = 9.
        let mut s4 = ScaleDependent::new(4, 1.0).unwrap();
        let scale = e * e;
        s4.ingest(&DVector::from_vec(vec![scale, 0.0, 0.0, 0.0]))
            .unwrap();
        let expect4 = (2.0 * (e / (e - 1.0)) * 4.0 * 9.0).sqrt();
        assert_relative_eq!(s4.alpha_bound(), expect4, max_relative = 1e-12);
    }

    #[test]
    fn empty_stream_has_no_result() {
        let s = ScaleDependent::new(2, 1.0).unwrap();
        assert!(matches!(s.result(), Err(Error::EmptyStream)));
    }

    #[test]
    fn serde_round_trip() {
        let mut s = ScaleDependent::new(2, 1.0).unwrap();
        s.ingest(&DVector::from_vec(vec![2.0, 1.0])).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: ScaleDependent = serde_json::from_str(&json).unwrap();
        assert_eq!(back.steps(), s.steps());
        assert_eq!(back.accepted(), s.accepted());
        assert!(form_rel_diff(s.ellipsoid(), back.ellipsoid()).unwrap() < 1e-15);
    }
}
