//! Shared input builders for the benchmarks: reproducible point streams
//! with the norm profile used by the throughput tests.

use hullsketch::generators::unit_sphere;
use hullsketch::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` points of dimension `dim` with norms uniform in [0.5, 2), drawn from
/// a ChaCha stream so repeated runs measure the same work.
pub fn stream(dim: usize, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| unit_sphere(&mut rng, dim) * rng.random_range(0.5f64..2.0))
        .collect()
}
