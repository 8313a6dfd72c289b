//! Deterministic input generators: the two-phase adversarial stream that
//! forces any one-pass ellipsoid algorithm toward the √(d−1/2) distortion
//! wall, and conditioned random streams with known ground-truth geometry
//! for calibration runs. Plus the small sampling helpers (`unit_sphere`,
//! `random_orthogonal`) shared by tests and the oracles.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::ellipsoid::{Ellipsoid, Point};
use crate::error::{Error, Result};

/// Uniform point on the unit sphere in ℝᵈ via normalized Gaussians.
pub fn unit_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Point {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Haar-ish random rotation: QR of a Gaussian matrix with the sign
/// ambiguity fixed so diag(R) ≥ 0.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Sylvester-construction Hadamard matrix of the given power-of-two order,
/// scaled by 1/√order so its columns are orthonormal (entries ±1/√order).
pub fn hadamard_matrix(order: usize) -> Result<DMatrix<f64>> {
    if order == 0 || !order.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { order });
    }
    let mut h = DMatrix::from_element(1, 1, 1.0);
    let mut k = 1;
    while k < order {
        let mut next = DMatrix::zeros(2 * k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                let v = h[(i, j)];
                next[(i, j)] = v;
                next[(i, j + k)] = v;
                next[(i + k, j)] = v;
                next[(i + k, j + k)] = -v;
            }
        }
        h = next;
        k *= 2;
    }
    Ok(h / (order as f64).sqrt())
}

/// The two-phase lower-bound instance. Phase 1 streams the columns of a
/// normalized Hadamard matrix (all on the unit sphere, jointly isotropic,
/// revealing nothing about the final shape). Phase 2 then streams the
/// standard basis rescaled so that one coordinate, the `outcome`, is the
/// short direction:
///
///   wᵢ = eᵢ / √(d−ε)        for i = outcome,
///   w_j = e_j · √((d−1)/ε)  for j ≠ outcome.
///
/// The optimal ellipsoid for the full stream is the diagonal form returned
/// by [`AdversaryInstance::optimal_form`], and every phase-1 point sits on
/// its boundary, so no algorithm can distinguish outcomes during phase 1.
#[derive(Clone, Debug)]
pub struct AdversaryInstance {
    dim: usize,
    eps: f64,
    outcome: usize,
}

impl AdversaryInstance {
    /// `dim` must be a power of two ≥ 2 (the Hadamard construction),
    /// `eps` in (0, dim−1), and `outcome` a 1-based coordinate index.
    pub fn new(dim: usize, eps: f64, outcome: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: format!("need dim >= 2, got {dim}"),
            });
        }
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { order: dim });
        }
        if !(eps.is_finite() && eps > 0.0 && eps < (dim - 1) as f64) {
            return Err(Error::InvalidParameter {
                name: "eps",
                reason: format!("need 0 < eps < dim-1 = {}, got {eps}", dim - 1),
            });
        }
        if outcome == 0 || outcome > dim {
            return Err(Error::InvalidParameter {
                name: "outcome",
                reason: format!("outcome is 1-based in 1..={dim}, got {outcome}"),
            });
        }
        Ok(Self { dim, eps, outcome })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// 1-based index of the coordinate squeezed in phase 2.
    pub fn outcome(&self) -> usize {
        self.outcome
    }

    /// The d Hadamard columns, each of unit norm.
    pub fn phase_one(&self) -> Vec<Point> {
        let h = hadamard_matrix(self.dim).expect("validated power of two");
        (0..self.dim).map(|j| h.column(j).into_owned()).collect()
    }

    /// The d rescaled basis vectors revealing the outcome.
    pub fn phase_two(&self) -> Vec<Point> {
        let d = self.dim as f64;
        let short = 1.0 / (d - self.eps).sqrt();
        let long = ((d - 1.0) / self.eps).sqrt();
        (0..self.dim)
            .map(|i| {
                let scale = if i + 1 == self.outcome { short } else { long };
                let mut e = DVector::zeros(self.dim);
                e[i] = scale;
                e
            })
            .collect()
    }

    /// Full stream: phase 1 followed by phase 2.
    pub fn stream(&self) -> Vec<Point> {
        let mut pts = self.phase_one();
        pts.extend(self.phase_two());
        pts
    }

    /// The minimum-volume ellipsoid of the full stream's symmetric hull:
    /// diagonal, with the outcome axis of length 1/√(d−ε) and all others
    /// √(ε/(d−1)) (the reciprocals appear in the form matrix). Phase-1
    /// points x satisfy ‖J_opt·x‖² = (d−ε)/d + (d−1)/d · ε/(d−1) = 1
    /// exactly, so they all lie on this ellipsoid's boundary.
    pub fn optimal_form(&self) -> Ellipsoid {
        let d = self.dim as f64;
        let short_inv = (d - self.eps).sqrt();
        let long_inv = (self.eps / (d - 1.0)).sqrt();
        let a = DMatrix::from_fn(self.dim, self.dim, |i, j| {
            if i != j {
                0.0
            } else if i + 1 == self.outcome {
                short_inv
            } else {
                long_inv
            }
        });
        Ellipsoid::new(a).expect("diagonal positive form")
    }
}

/// Convenience wrapper: the full 2d-point adversarial stream.
pub fn adversary_stream(dim: usize, eps: f64, outcome: usize) -> Result<Vec<Point>> {
    Ok(AdversaryInstance::new(dim, eps, outcome)?.stream())
}

/// A random stream with known ground truth, produced by
/// [`conditioned_stream`].
#[derive(Clone, Debug)]
pub struct ConditionedStream {
    pub points: Vec<Point>,
    /// Radius of the largest origin-centered ball inside the hull.
    pub inner_radius: f64,
    /// Radius of the smallest origin-centered ball containing the hull.
    pub outer_radius: f64,
    /// The ellipsoid whose boundary the points were sampled from.
    pub generating_form: Ellipsoid,
}

/// Streams `n` points sampled on the boundary of a rotated ellipsoid with
/// log-spaced semi-axes tuned so the hull's outer/inner radius ratio is
/// `kappa` exactly, then normalized to inner radius 1. The first 2d samples
/// are the semi-axis endpoints, the rest random boundary points; the whole
/// stream is then shuffled. `outer_radius` is exact for the hull (no point
/// has larger norm and the long-axis endpoints reach it); `inner_radius` is
/// the inradius of the axis-endpoint cross-polytope, a certified contained
/// ball for the hull, which extra boundary samples can only fatten. The
/// reported ratio is therefore always an upper bound on the hull's true
/// outer/inner ratio.
///
/// Requires n ≥ 2·dim and kappa ≥ 1. Ratios below √dim are not achievable
/// by any centered ellipsoid's axis-endpoint hull in dimension `dim`; such
/// requests degrade to the sphere instance (all semi-axes equal), whose
/// true ratio √dim is reported in the metadata rather than the requested
/// value.
pub fn conditioned_stream(
    dim: usize,
    n: usize,
    kappa: f64,
    seed: u64,
) -> Result<ConditionedStream> {
    if dim == 0 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: "need dim >= 1".into(),
        });
    }
    if n < 2 * dim {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("need n >= 2*dim = {}, got {n}", 2 * dim),
        });
    }
    if !(kappa.is_finite() && kappa >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "kappa",
            reason: format!("need kappa >= 1, got {kappa}"),
        });
    }

    let d = dim as f64;
    // Hull of the axis endpoints {±gᵢqᵢ} is a scaled cross-polytope: its
    // inradius is 1/√(Σ gᵢ⁻²) and its circumradius max gᵢ. With
    // gᵢ(θ) = exp(−θ(i−1)/(d−1)) the ratio R/r = √(Σᵢ exp(2θ(i−1)/(d−1)))
    // grows monotonically from √d at θ = 0, so bisection pins any target
    // ratio ≥ √d.
    let ratio = |theta: f64| -> f64 {
        (0..dim)
            .map(|i| {
                if dim == 1 {
                    1.0
                } else {
                    (2.0 * theta * i as f64 / (d - 1.0)).exp()
                }
            })
            .sum::<f64>()
            .sqrt()
    };
    let theta = if dim == 1 || kappa <= d.sqrt() {
        // Dimension 1 only admits ratio 1; below √d no centered ellipsoid
        // skeleton can be that round, so both cases fall back to the sphere.
        0.0
    } else {
        let mut lo = 0.0;
        let mut hi = 2.0 * (kappa.ln() + d.ln() + 1.0);
        debug_assert!(ratio(hi) >= kappa);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid) >= kappa {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let mut axes: Vec<f64> = (0..dim)
        .map(|i| {
            if dim == 1 {
                1.0
            } else {
                (-theta * i as f64 / (d - 1.0)).exp()
            }
        })
        .collect();
    // Normalize to inner radius exactly 1.
    let inv_sq: f64 = axes.iter().map(|g| g.powi(-2)).sum();
    let scale = inv_sq.sqrt();
    for g in &mut axes {
        *g *= scale;
    }
    let inner_radius = 1.0;
    let outer_radius = axes[0];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(&mut rng, dim);
    let mut points = Vec::with_capacity(n);
    for (i, &g) in axes.iter().enumerate() {
        let axis = q.column(i) * g;
        points.push(-&axis);
        points.push(axis);
    }
    for _ in 0..n - 2 * dim {
        let u = unit_sphere(&mut rng, dim);
        let stretched = DVector::from_fn(dim, |i, _| axes[i] * u[i]);
        points.push(&q * stretched);
    }
    points.shuffle(&mut rng);

    let a = DMatrix::from_fn(dim, dim, |i, j| {
        (0..dim).map(|k| q[(i, k)] / axes[k] * q[(j, k)]).sum()
    });
    let generating_form = Ellipsoid::new(a)?;
    Ok(ConditionedStream {
        points,
        inner_radius,
        outer_radius,
        generating_form,
    })
}
