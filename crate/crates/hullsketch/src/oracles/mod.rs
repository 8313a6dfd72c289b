//! Independent reference computations used to audit the streaming
//! algorithms: an exact gauge evaluator, a brute-force minimum-volume
//! ellipsoid, the simplex core underneath both, and a measured
//! approximation factor that compares an ellipsoid against the true
//! symmetric hull it claims to cover.

pub mod gauge;
pub mod mvee;
pub mod simplex;

pub use gauge::{gauge, GaugeQuery, GaugeSolver};
pub use mvee::{mvee, MveeSolution};
pub use simplex::LpSolution;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ellipsoid::{Ellipsoid, Point};
use crate::error::{Error, Result};
use crate::generators::unit_sphere;

/// Points may poke out of the ellipsoid by this relative amount before the
/// covering precondition of [`measured_factor`] is considered violated.
pub const COVERING_CHECK_TOL: f64 = 1e-8;

/// Measures how loose an ellipsoid is around the symmetric convex hull of
/// `points`: the maximum hull-gauge over probe points on the ellipsoid
/// boundary. A factor of α means the ellipsoid would have to shrink by α to
/// touch the hull in the worst probed direction; 1.0 means tight everywhere
/// probed. Requires the ellipsoid to actually cover the points, otherwise
/// [`Error::NotCovering`] reports the first offender.
///
/// Probes are the 2d semi-axis endpoints plus `n_dirs` uniformly random
/// boundary points drawn from a ChaCha stream seeded with `seed`, so
/// results are reproducible.
pub fn measured_factor(
    ellipsoid: &Ellipsoid,
    points: &[Point],
    n_dirs: usize,
    seed: u64,
) -> Result<f64> {
    let dim = ellipsoid.dim();
    for (index, x) in points.iter().enumerate() {
        let norm = ellipsoid.norm_of(x)?;
        if norm > 1.0 + COVERING_CHECK_TOL {
            return Err(Error::NotCovering { index, norm });
        }
    }
    let solver = GaugeSolver::new(points)?;
    let svd = ellipsoid.to_svd()?;
    let mut worst: f64 = 1.0;
    // Semi-axis endpoints are the extreme points of the ellipsoid along its
    // principal directions; random boundary points cover everything else.
    for i in 0..dim {
        let endpoint = svd.v().column(i) * svd.sigma()[i];
        worst = worst.max(solver.gauge(&endpoint)?);
        worst = worst.max(solver.gauge(&(-&endpoint))?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_dirs {
        let u = unit_sphere(&mut rng, dim);
        let boundary = &u / ellipsoid.norm_of(&u)?;
        worst = worst.max(solver.gauge(&boundary)?);
    }
    Ok(worst)
}
