//! Exact gauge (Minkowski functional) of a symmetric convex hull.
//!
//! For vertices X = {x₁, …, x_n} and the body K = conv(±x₁, …, ±x_n), the
//! gauge of y is
//!
//!   ‖y‖_K = min { Σᵢ λᵢ : y = Σᵢ λᵢ sᵢ xᵢ, λᵢ ≥ 0, sᵢ ∈ {±1} },
//!
//! the smallest t with y ∈ t·K. Splitting each vertex into a ± pair turns
//! this into the equality-form linear program solved by [`simplex`]. The
//! value is finite exactly when the vertices span ℝᵈ, which
//! [`GaugeSolver::new`] checks once up front so repeated queries skip it.
//!
//! [`simplex`]: super::simplex

use nalgebra::{DMatrix, DVector};

use super::simplex;
use crate::ellipsoid::Point;
use crate::error::{Error, Result};

/// Relative singular-value cutoff for the span (rank) check.
const RANK_REL_TOL: f64 = 1e-10;

/// A single gauge evaluation: vertices of the symmetric hull plus the query
/// point.
#[derive(Clone, Debug)]
pub struct GaugeQuery {
    pub vertices: Vec<Point>,
    pub y: Point,
}

/// Reusable gauge evaluator over a fixed vertex set.
#[derive(Clone, Debug)]
pub struct GaugeSolver {
    /// d×2n matrix of columns [x₁, −x₁, x₂, −x₂, …].
    columns: DMatrix<f64>,
    dim: usize,
}

impl GaugeSolver {
    /// Validates the vertex set (consistent dimensions, finite entries,
    /// full span) and prepares the LP column matrix.
    pub fn new(vertices: &[Point]) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidParameter {
                name: "vertices",
                reason: "empty vertex set".into(),
            });
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "vertices",
                reason: "zero-dimensional points".into(),
            });
        }
        for v in vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite {
                    context: "gauge vertex",
                });
            }
        }

        let n = vertices.len();
        let spread = DMatrix::from_fn(dim, n, |i, j| vertices[j][i]);
        let sv = crate::linalg::singular_values(&spread);
        let cutoff = sv.max() * RANK_REL_TOL;
        let rank = sv.iter().filter(|&&s| s > cutoff).count();
        if rank < dim {
            return Err(Error::DegenerateSpan { rank, dim });
        }

        let mut columns = DMatrix::zeros(dim, 2 * n);
        for (j, v) in vertices.iter().enumerate() {
            for i in 0..dim {
                columns[(i, 2 * j)] = v[i];
                columns[(i, 2 * j + 1)] = -v[i];
            }
        }
        Ok(Self { columns, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Gauge of y with respect to the stored hull. Zero queries short-cut
    /// to 0 without touching the LP.
    pub fn gauge(&self, y: &Point) -> Result<f64> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        if !y.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite {
                context: "gauge query point",
            });
        }
        if y.iter().all(|&c| c == 0.0) {
            return Ok(0.0);
        }
        let cost = DVector::from_element(self.columns.ncols(), 1.0);
        match simplex::minimize(&self.columns, y, &cost)? {
            Some(sol) => Ok(sol.objective.max(0.0)),
            // The vertices span ℝᵈ, so every y is reachable; an infeasible
            // verdict can only be numerical collapse inside the LP.
            None => Err(Error::LpFailure {
                reason: "gauge LP reported infeasible for a spanning vertex set".into(),
            }),
        }
    }
}

/// One-shot convenience wrapper around [`GaugeSolver`].
pub fn gauge(query: &GaugeQuery) -> Result<f64> {
    GaugeSolver::new(&query.vertices)?.gauge(&query.y)
}
