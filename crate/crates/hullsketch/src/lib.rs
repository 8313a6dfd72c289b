//! Streaming outer approximation of the symmetric convex hull of a point
//! stream by an ellipsoid, in one pass and O(d²) memory.
//!
//! Two algorithms are provided. [`ScaleDependent`] needs a known inner
//! radius r > 0 (a promise that the hull contains the ball of radius r) and
//! grows an ellipsoid from that ball by minimum-volume rank-one updates;
//! its distortion bound degrades only logarithmically in the spread R/r.
//! [`ScaleIndependent`] needs no radii at all: it bootstraps from the first
//! point and instead constrains the ellipsoid's aspect ratio by a cap ξ,
//! clamping short axes upward after each update. Both maintain the
//! invariant that every point seen so far lies inside the current
//! ellipsoid, and both report a certified approximation factor α with
//! E ⊆ α·conv(±x₁, …, ±x_t).
//!
//! The rest of the crate is audit machinery: [`potential`] traces the
//! Frobenius/log-det potential that drives the proofs and re-verifies its
//! laws offline, [`oracles`] recomputes ground truth (exact hull gauges by
//! linear programming, brute-force minimum-volume ellipsoids, measured
//! approximation factors), [`generators`] builds adversarial and
//! conditioned input streams, and [`coreset`] maintains a size-bounded
//! subset of the stream supporting directional-width queries.

pub use nalgebra;

pub mod coreset;
pub mod ellipsoid;
pub mod error;
pub mod generators;
mod linalg;
pub mod oracles;
pub mod potential;
pub mod scale_dependent;
pub mod scale_independent;

pub use coreset::{Coreset, CoresetExport, SketchAnswer};
pub use ellipsoid::{form_rel_diff, Ellipsoid, EllipsoidSvd, Point};
pub use error::{Error, Result};
pub use potential::{sigma_max_bound, PotentialTrace, Reference, VerificationReport};
pub use scale_dependent::{ScaleDependent, ScaleDependentResult};
pub use scale_independent::{
    ghost_points, simulate_ghost_points, GhostPointBatch, ScaleIndependent,
    ScaleIndependentResult,
};
