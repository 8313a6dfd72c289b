//! Centered ellipsoids, their factored form, and the rank-one minimum-volume
//! update that drives the streaming algorithms.
//!
//! A nonsingular matrix A defines the ellipsoid E_A = {x : ‖Ax‖ ≤ 1}. The
//! semi-axis lengths of E_A are the reciprocals of the singular values of A.
//! [`EllipsoidSvd`] stores the factorization A = U·Σ⁻¹·Vᵀ where the diagonal
//! of Σ holds the semi-axes themselves, largest first, so growth of the
//! ellipsoid reads directly as growth of Σ.
//!
//! U is a gauge freedom: E_A depends on A only through AᵀA, so two states
//! are compared via their quadratic forms, never entrywise.

use nalgebra::{DMatrix, DVector};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Points are plain column vectors; every operation validates dimension and
/// finiteness at the boundary.
pub type Point = DVector<f64>;

/// Relative slack above 1 under which a point counts as interior and a
/// rank-one update is refused.
pub const INTERIOR_TOL: f64 = 1e-12;

/// Orthonormality defect allowed per dimension when accepting U and V
/// factors: ‖UᵀU − I‖_F ≤ ORTHO_TOL · d.
pub const ORTHO_TOL: f64 = 1e-10;

/// Condition number beyond which a matrix is reported singular rather than
/// trusted.
const COND_GUARD: f64 = 1e14;

fn check_vector(x: &DVector<f64>, dim: usize, context: &'static str) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite { context });
    }
    Ok(())
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub(crate) fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "matrix rows",
            reason: "empty".into(),
        });
    }
    let m = rows[0].len();
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidParameter {
            name: "matrix rows",
            reason: "ragged row lengths".into(),
        });
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// Centered ellipsoid E_A = {x : ‖Ax‖ ≤ 1} stored as the dense matrix A.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    a: DMatrix<f64>,
}

impl Ellipsoid {
    /// Accepts any finite, square, nonsingular matrix. Singularity is
    /// checked against the singular values, not assumed.
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: format!("must be square and nonempty, got {}x{}", a.nrows(), a.ncols()),
            });
        }
        if !a.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "ellipsoid matrix",
            });
        }
        let sv = crate::linalg::singular_values(&a);
        let s_max = sv[0];
        let s_min = sv[sv.len() - 1];
        if s_min <= 0.0 || s_max / s_min > COND_GUARD {
            return Err(Error::Singular {
                context: "ellipsoid matrix",
                cond: if s_min > 0.0 { s_max / s_min } else { f64::INFINITY },
            });
        }
        Ok(Self { a })
    }

    /// Ball of the given radius: A = (1/radius)·I.
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "must be positive".into(),
            });
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidRadius { value: radius });
        }
        Ok(Self {
            a: DMatrix::identity(dim, dim) / radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.a
    }

    /// ‖Ax‖, the gauge of x with respect to this ellipsoid.
    pub fn norm_of(&self, x: &Point) -> Result<f64> {
        check_vector(x, self.dim(), "norm query")?;
        Ok((&self.a * x).norm())
    }

    /// Membership with relative slack: ‖Ax‖ ≤ 1 + rel_tol.
    pub fn contains(&self, x: &Point, rel_tol: f64) -> Result<bool> {
        Ok(self.norm_of(x)? <= 1.0 + rel_tol)
    }

    /// The quadratic form AᵀA, the gauge-invariant fingerprint of E_A.
    pub fn quadratic_form(&self) -> DMatrix<f64> {
        self.a.transpose() * &self.a
    }

    /// Minimum-volume ellipsoid containing E_A ∪ {±x}, for x strictly
    /// outside E_A. Returns the new ellipsoid and det(A')/det(A) = 1/‖Ax‖.
    ///
    /// With g = Ax and c = ‖g‖ > 1 the update is
    /// A' = A − ((1 − 1/c)/c²)·g·(gᵀA), a rank-one change of A. The new
    /// boundary passes through x exactly: ‖A'x‖ = 1.
    pub fn rank_one_update(&self, x: &Point) -> Result<(Self, f64)> {
        check_vector(x, self.dim(), "rank-one update")?;
        let g = &self.a * x;
        let c = g.norm();
        if !c.is_finite() {
            return Err(Error::NonFinite {
                context: "rank-one update norm",
            });
        }
        if c <= 1.0 + INTERIOR_TOL {
            return Err(Error::InteriorPoint { norm: c });
        }
        let coef = (1.0 - 1.0 / c) / (c * c);
        let gt_a = (g.transpose() * &self.a).transpose();
        let mut a_new = self.a.clone();
        a_new.ger(-coef, &g, &gt_a, 1.0);
        Ok((Self { a: a_new }, 1.0 / c))
    }

    /// Polar ellipsoid: E_A° = E_B with B = A⁻ᵀ, so semi-axes invert.
    pub fn polar(&self) -> Result<Self> {
        let svd = crate::linalg::jacobi_svd(&self.a);
        let sv = &svd.sigma;
        let s_max = sv[0];
        let s_min = sv[sv.len() - 1];
        if s_min <= 0.0 || s_max / s_min > COND_GUARD {
            return Err(Error::Singular {
                context: "polar",
                cond: if s_min > 0.0 { s_max / s_min } else { f64::INFINITY },
            });
        }
        // A = P·D·Qᵀ gives A⁻ᵀ = P·D⁻¹·Qᵀ.
        let mut d_inv = DMatrix::zeros(sv.len(), sv.len());
        for i in 0..sv.len() {
            d_inv[(i, i)] = 1.0 / sv[i];
        }
        Ok(Self {
            a: &svd.u * d_inv * svd.v.transpose(),
        })
    }

    /// Ratio of largest to smallest semi-axis.
    pub fn aspect_ratio(&self) -> f64 {
        let sv = crate::linalg::singular_values(&self.a);
        sv[0] / sv[sv.len() - 1]
    }

    /// Semi-axis lengths, largest first.
    pub fn semi_axes(&self) -> DVector<f64> {
        let sv = crate::linalg::singular_values(&self.a);
        let d = sv.len();
        DVector::from_fn(d, |i, _| 1.0 / sv[d - 1 - i])
    }

    /// ln |det A|. Volume of E_A is vol(unit ball) / |det A|.
    pub fn log_det(&self) -> f64 {
        let sv = crate::linalg::singular_values(&self.a);
        sv.iter().map(|s| s.ln()).sum()
    }

    /// Factored form with semi-axes on the diagonal, largest first.
    pub fn to_svd(&self) -> Result<EllipsoidSvd> {
        let svd = crate::linalg::jacobi_svd(&self.a);
        let sv = &svd.sigma;
        let d = sv.len();
        let s_max = sv[0];
        let s_min = sv[d - 1];
        if s_min <= 0.0 || s_max / s_min > COND_GUARD {
            return Err(Error::Singular {
                context: "svd factorization",
                cond: if s_min > 0.0 { s_max / s_min } else { f64::INFINITY },
            });
        }
        // A = P·D·Qᵀ = U·Σ⁻¹·Vᵀ with σ_i = 1/d_{d+1-i}; reversing columns
        // turns descending singular values into descending semi-axes.
        let u = DMatrix::from_fn(d, d, |i, j| svd.u[(i, d - 1 - j)]);
        let v = DMatrix::from_fn(d, d, |i, j| svd.v[(i, d - 1 - j)]);
        let sigma = DVector::from_fn(d, |i, _| 1.0 / sv[d - 1 - i]);
        EllipsoidSvd::new(u, sigma, v)
    }
}

/// Gauge-invariant relative difference of two ellipsoids:
/// ‖AᵀA − BᵀB‖_F / ‖AᵀA‖_F. Zero iff the ellipsoids are the same set.
pub fn form_rel_diff(a: &Ellipsoid, b: &Ellipsoid) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let fa = a.quadratic_form();
    let fb = b.quadratic_form();
    Ok((&fa - &fb).norm() / fa.norm())
}

impl Serialize for Ellipsoid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(&self.a).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Ellipsoid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        let m = rows_to_matrix(&rows).map_err(D::Error::custom)?;
        Ellipsoid::new(m).map_err(D::Error::custom)
    }
}

/// Factored ellipsoid A = U·Σ⁻¹·Vᵀ with U, V orthonormal and Σ the diagonal
/// of semi-axis lengths, stored largest first.
///
/// This form makes the two scale-independent maintenance steps cheap to
/// state: clamping small semi-axes edits Σ directly, and the spectral
/// geometry (largest axis, volume) reads off Σ without refactoring.
#[derive(Clone, Debug)]
pub struct EllipsoidSvd {
    u: DMatrix<f64>,
    sigma: DVector<f64>,
    v: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct SvdRepr {
    u: Vec<Vec<f64>>,
    sigma: Vec<f64>,
    v: Vec<Vec<f64>>,
}

impl EllipsoidSvd {
    /// Accepts orthonormal factors (defect ≤ ORTHO_TOL·d in Frobenius norm)
    /// and positive finite semi-axes. Axes are sorted largest first, with
    /// the matching column permutation applied to U and V.
    pub fn new(u: DMatrix<f64>, sigma: DVector<f64>, v: DMatrix<f64>) -> Result<Self> {
        let d = sigma.len();
        if d == 0 {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: "empty".into(),
            });
        }
        for (m, name) in [(&u, "u"), (&v, "v")] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: m.nrows().max(m.ncols()),
                });
            }
            if !m.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite {
                    context: "svd factor",
                });
            }
            let defect = (m.transpose() * m - DMatrix::identity(d, d)).norm();
            if defect > ORTHO_TOL * d as f64 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("not orthonormal, defect {defect:.3e}"),
                });
            }
        }
        if !sigma.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: "semi-axes must be finite and positive".into(),
            });
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).expect("finite axes"));
        let sorted = Self {
            u: DMatrix::from_fn(d, d, |i, j| u[(i, order[j])]),
            sigma: DVector::from_fn(d, |i, _| sigma[order[i]]),
            v: DMatrix::from_fn(d, d, |i, j| v[(i, order[j])]),
        };
        Ok(sorted)
    }

    /// Ball of the given radius: U = V = I, Σ = radius·I.
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "must be positive".into(),
            });
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidRadius { value: radius });
        }
        Ok(Self {
            u: DMatrix::identity(dim, dim),
            sigma: DVector::from_element(dim, radius),
            v: DMatrix::identity(dim, dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Semi-axis lengths, largest first.
    pub fn sigma(&self) -> &DVector<f64> {
        &self.sigma
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Dense A = U·Σ⁻¹·Vᵀ.
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut scaled = self.u.clone();
        for j in 0..d {
            let inv = 1.0 / self.sigma[j];
            for i in 0..d {
                scaled[(i, j)] *= inv;
            }
        }
        scaled * self.v.transpose()
    }

    pub fn to_ellipsoid(&self) -> Result<Ellipsoid> {
        Ellipsoid::new(self.matrix())
    }

    pub fn from_ellipsoid(e: &Ellipsoid) -> Result<Self> {
        e.to_svd()
    }

    /// ‖Ax‖ evaluated in factored form: ‖Σ⁻¹·Vᵀx‖.
    pub fn norm_of(&self, x: &Point) -> Result<f64> {
        check_vector(x, self.dim(), "norm query")?;
        let w = self.v.transpose() * x;
        let mut acc = 0.0;
        for i in 0..w.len() {
            let t = w[i] / self.sigma[i];
            acc += t * t;
        }
        Ok(acc.sqrt())
    }

    /// Refactored state after the rank-one change A + y·zᵀ, recomputed by a
    /// full SVD of the dense sum. Errors if the sum loses full rank.
    pub fn recompose_update(&self, y: &Point, z: &Point) -> Result<Self> {
        let d = self.dim();
        check_vector(y, d, "recompose update")?;
        check_vector(z, d, "recompose update")?;
        let mut m = self.matrix();
        m.ger(1.0, y, z, 1.0);
        let svd = crate::linalg::jacobi_svd(&m);
        let sv = &svd.sigma;
        let s_max = sv[0];
        let s_min = sv[d - 1];
        if !(s_min.is_finite() && s_min > f64::EPSILON * d as f64 * s_max) {
            return Err(Error::ResultSingular {
                context: "rank-one recompose",
            });
        }
        let u = DMatrix::from_fn(d, d, |i, j| svd.u[(i, d - 1 - j)]);
        let v = DMatrix::from_fn(d, d, |i, j| svd.v[(i, d - 1 - j)]);
        let sigma = DVector::from_fn(d, |i, _| 1.0 / sv[d - 1 - i]);
        Self::new(u, sigma, v)
    }

    /// Raises every semi-axis below the floor up to it. Ordering is
    /// preserved; the ellipsoid only grows.
    pub fn raise_semi_axes_to(&mut self, floor: f64) {
        for i in 0..self.sigma.len() {
            if self.sigma[i] < floor {
                self.sigma[i] = floor;
            }
        }
    }

    /// ln Π σ_i. Differences of this across states are log volume ratios.
    pub fn log_axes_product(&self) -> f64 {
        self.sigma.iter().map(|s| s.ln()).sum()
    }
}

impl Serialize for EllipsoidSvd {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SvdRepr {
            u: matrix_to_rows(&self.u),
            sigma: self.sigma.iter().copied().collect(),
            v: matrix_to_rows(&self.v),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EllipsoidSvd {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SvdRepr::deserialize(deserializer)?;
        let u = rows_to_matrix(&repr.u).map_err(D::Error::custom)?;
        let v = rows_to_matrix(&repr.v).map_err(D::Error::custom)?;
        EllipsoidSvd::new(u, DVector::from_vec(repr.sigma), v).map_err(D::Error::custom)
    }
}
