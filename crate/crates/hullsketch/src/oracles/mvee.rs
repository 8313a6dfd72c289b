//! Brute-force minimum-volume enclosing ellipsoid of a symmetric point set,
//! computed by Khachiyan's barycentric coordinate-descent on the centered
//! problem.
//!
//! For points x₁, …, x_n the iteration maintains weights u ≥ 0, Σu = 1 and
//! the moment matrix M(u) = Σᵢ uᵢ xᵢxᵢᵀ. With leverages
//! κⱼ = xⱼᵀ M(u)⁻¹ xⱼ it repeatedly shifts mass toward the point of largest
//! leverage:
//!
//!   β = (κ_max − d) / (d·(κ_max − 1)),   u ← (1−β)·u + β·e_{j*}.
//!
//! Since Σⱼ uⱼκⱼ = d, the maximum leverage is always ≥ d, and the loop
//! stops when κ_max ≤ (1+tol)·d. At that point H = M(u)⁻¹ / κ_max defines
//! the form xᵀHx ≤ 1 which contains every input point by construction,
//! while vol(E_H) ≤ (1+tol)^{d/2}·vol(MVEE); `gap = κ_max/d − 1 ≤ tol`
//! certifies the distance to optimality.
//!
//! Plain add-steps alone converge only sublinearly and stall at tight
//! tolerances, so when the smallest leverage over the current support is
//! further from d than the largest, the iteration takes a Wolfe away-step
//! instead: the same β formula with κ_min, clamped from below so the
//! shrinking weight stays nonnegative. This is the standard linearly
//! convergent variant.

use nalgebra::DMatrix;

use crate::ellipsoid::Point;
use crate::error::{Error, Result};

/// Hard cap on coordinate-descent steps, per dimension.
const ITER_CAP_PER_DIM: usize = 1_000_000;

/// Rebuild M(u) from scratch this often to shed incremental-update drift.
const REFRESH_EVERY: usize = 1_024;

/// Output of [`mvee`]: the quadratic form H with xᵀHx ≤ 1 for every input
/// point, the final weights, the relative leverage gap at termination, and
/// the number of descent steps taken.
#[derive(Clone, Debug)]
pub struct MveeSolution {
    pub form: DMatrix<f64>,
    pub weights: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
}

fn moment_matrix(points: &[Point], u: &[f64], dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for (x, &w) in points.iter().zip(u) {
        if w > 0.0 {
            m.ger(w, x, x, 1.0);
        }
    }
    m
}

/// Minimum-volume ellipsoid (up to relative tolerance `tol` on the leverage
/// gap) covering {±x₁, …, ±x_n}. The returned form is symmetric positive
/// definite; feeding points that span only a proper subspace yields
/// [`Error::DegenerateSpan`].
pub fn mvee(points: &[Point], tol: f64) -> Result<MveeSolution> {
    let Some(first) = points.first() else {
        return Err(Error::EmptyStream);
    };
    let dim = first.len();
    if dim == 0 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "zero-dimensional points".into(),
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("tolerance must be positive and finite, got {tol}"),
        });
    }
    for x in points {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        if !x.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite {
                context: "mvee input point",
            });
        }
    }
    // Span check up front so the first inverse cannot blow up silently.
    let spread = DMatrix::from_fn(dim, points.len(), |i, j| points[j][i]);
    let sv = crate::linalg::singular_values(&spread);
    let rank = sv.iter().filter(|&&s| s > sv.max() * 1e-10).count();
    if rank < dim {
        return Err(Error::DegenerateSpan { rank, dim });
    }

    let n = points.len();
    let d = dim as f64;
    let mut u = vec![1.0 / n as f64; n];
    let mut m = moment_matrix(points, &u, dim);
    let cap = ITER_CAP_PER_DIM * dim;

    for iter in 0..=cap {
        if iter > 0 && iter % REFRESH_EVERY == 0 {
            // Shed drift: the weights provably sum to 1 step by step, but
            // thousands of scale-and-bump updates erode that in floats.
            let total: f64 = u.iter().sum();
            for w in &mut u {
                *w /= total;
            }
            m = moment_matrix(points, &u, dim);
        }
        let m_inv = m.clone().try_inverse().ok_or(Error::Singular {
            context: "mvee moment matrix",
            cond: f64::INFINITY,
        })?;
        let mut kappa_max = f64::NEG_INFINITY;
        let mut j_max = 0;
        let mut kappa_min = f64::INFINITY;
        let mut j_min = 0;
        for (j, x) in points.iter().enumerate() {
            let kappa = (&m_inv * x).dot(x);
            if kappa > kappa_max {
                kappa_max = kappa;
                j_max = j;
            }
            if u[j] > 0.0 && kappa < kappa_min {
                kappa_min = kappa;
                j_min = j;
            }
        }
        if !kappa_max.is_finite() {
            return Err(Error::NonFinite {
                context: "mvee leverage",
            });
        }
        if kappa_max <= (1.0 + tol) * d {
            let mut form = m_inv / kappa_max;
            // Symmetrize: the inverse picks up asymmetry at roundoff level.
            form = (&form + form.transpose()) * 0.5;
            return Ok(MveeSolution {
                form,
                weights: u,
                gap: kappa_max / d - 1.0,
                iterations: iter,
            });
        }
        let away = d - kappa_min > kappa_max - d;
        let (j_star, beta) = if away {
            // The floor keeps the shrinking weight at ≥ 0 (a drop step when
            // it binds). The 1-d optimizer of log det along this direction
            // exists only for κ > 1; at or below 1 the formula's root lies
            // beyond the pole at β = 1 while the objective is monotone on
            // the feasible side, so the full step to the floor is optimal.
            let floor = -u[j_min] / (1.0 - u[j_min]).max(f64::MIN_POSITIVE);
            let beta = if kappa_min > 1.0 + 1e-12 {
                ((kappa_min - d) / (d * (kappa_min - 1.0))).max(floor)
            } else {
                floor
            };
            (j_min, beta)
        } else {
            (j_max, (kappa_max - d) / (d * (kappa_max - 1.0)))
        };
        for w in &mut u {
            *w *= 1.0 - beta;
        }
        u[j_star] = (u[j_star] + beta).max(0.0);
        // M(u') = (1−β)·M(u) + β·x x ᵀ, cheap enough to keep per-step cost
        // at O(d²) plus the leverage sweep.
        m *= 1.0 - beta;
        m.ger(beta, &points[j_star], &points[j_star], 1.0);
    }
    Err(Error::NonConvergence {
        context: "mvee coordinate descent",
        iterations: cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellipsoid::Ellipsoid;
    use nalgebra::dvector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_diagonal_pair() {
        // {(1,1), (1,−1)} with symmetry fills the square's diagonals; the
        // MVEE of the square [−1,1]² is the circle of radius √2, H = I/2.
        let pts = vec![dvector![1.0, 1.0], dvector![1.0, -1.0]];
        let sol = mvee(&pts, 1e-6).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 0.5 } else { 0.0 };
                assert!(
                    (sol.form[(i, j)] - want).abs() < 1e-6,
                    "H[{i}{j}] = {}",
                    sol.form[(i, j)]
                );
            }
        }
        assert!(sol.gap <= 1e-6);
    }

    #[test]
    fn standard_basis_gives_unit_ball() {
        // ±e₁, ±e₂ form the cross-polytope; its MVEE is the unit ball.
        let pts = vec![dvector![1.0, 0.0], dvector![0.0, 1.0]];
        let sol = mvee(&pts, 1e-6).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((sol.form[(i, j)] - want).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn covers_all_inputs_and_weights_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Point> = (0..25)
            .map(|_| crate::generators::unit_sphere(&mut rng, 3) * 2.0)
            .collect();
        let sol = mvee(&pts, 1e-5).unwrap();
        for x in &pts {
            let q = (&sol.form * x).dot(x);
            assert!(q <= 1.0 + 1e-9, "point sticks out: xᵀHx = {q}");
        }
        let total: f64 = sol.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(sol.weights.iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn dominated_point_with_low_leverage_keeps_weights_valid() {
        // Shrunk from a failing random run: the second point is dominated
        // by the first, so its leverage falls below 1 while it still holds
        // weight. The away step must then take the full drop step; the
        // one-dimensional optimizer formula turns spurious below κ = 1 and
        // once drove this weight negative, breaking Σu = 1.
        let pts = vec![
            dvector![0.0, 0.0, 15.30415626824568],
            dvector![0.0, 0.0, 7.989133947058781],
            dvector![0.0, 83.36236912402575, 0.0],
            dvector![1.7211000887381378, 0.0, 0.0],
        ];
        let sol = mvee(&pts, 1e-5).unwrap();
        let total: f64 = sol.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "weights sum to {total}");
        assert!(sol.weights.iter().all(|&w| w >= 0.0));
        for x in &pts {
            let q = (&sol.form * x).dot(x);
            assert!(q <= 1.0 + 1e-8, "point sticks out: xᵀHx = {q}");
        }
    }

    #[test]
    fn recovers_a_known_ellipsoid_from_surface_samples() {
        // Sample the boundary of E = {‖Ax‖ ≤ 1} densely; the MVEE of the
        // samples converges to E itself, so H ≈ AᵀA.
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.2, 0.0, 0.0, 0.7, 0.1, 0.0, 0.0, 1.4],
        );
        let e = Ellipsoid::new(a.clone()).unwrap();
        let svd = e.to_svd().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pts = Vec::new();
        // Axis endpoints pin the extremes; random boundary points fill in.
        for i in 0..3 {
            pts.push(svd.v().column(i) * svd.sigma()[i]);
        }
        for _ in 0..37 {
            let u = crate::generators::unit_sphere(&mut rng, 3);
            let norm = e.norm_of(&u).unwrap();
            pts.push(u / norm);
        }
        let sol = mvee(&pts, 1e-7).unwrap();
        let target = a.transpose() * &a;
        let diff = (&sol.form - &target).norm() / target.norm();
        assert!(diff < 1e-3, "relative form error {diff}");
    }

    #[test]
    fn invariant_under_sign_flips_and_order() {
        let pts = vec![
            dvector![2.0, 0.3],
            dvector![-0.4, 1.5],
            dvector![1.0, 1.0],
        ];
        let flipped = vec![-&pts[2], &pts[0] * -1.0, pts[1].clone()];
        let a = mvee(&pts, 1e-8).unwrap();
        let b = mvee(&flipped, 1e-8).unwrap();
        let diff = (&a.form - &b.form).norm() / a.form.norm();
        assert!(diff < 1e-6, "form changed under sign/order: {diff}");
    }

    #[test]
    fn rejects_degenerate_span() {
        let pts = vec![dvector![1.0, 2.0], dvector![-2.0, -4.0]];
        match mvee(&pts, 1e-6) {
            Err(Error::DegenerateSpan { rank, dim }) => assert_eq!((rank, dim), (1, 2)),
            other => panic!("expected DegenerateSpan, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerance_and_empty_input() {
        assert!(matches!(mvee(&[], 1e-6), Err(Error::EmptyStream)));
        let pts = vec![dvector![1.0], dvector![-1.0]];
        assert!(matches!(
            mvee(&pts, 0.0),
            Err(Error::InvalidParameter { .. })
        ));
    }
}
