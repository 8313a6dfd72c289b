//! Small dense two-phase simplex for equality-form linear programs:
//! minimize cᵀλ subject to E·λ = y, λ ≥ 0.
//!
//! Written for desk scale (tens of rows, up to ~10⁴ columns) and
//! determinism: Dantzig pricing with smallest-index tie breaks, switching to
//! Bland's rule after a fixed iteration budget so degenerate instances
//! cannot cycle. Phase 1 runs on artificial variables; redundant rows left
//! behind by a rank-deficient system are zeroed out and their artificials
//! parked at value zero, where no later pivot can touch them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Entries below this magnitude never serve as pivots.
const PIVOT_EPS: f64 = 1e-11;

/// A reduced cost above −RC_EPS counts as optimal.
const RC_EPS: f64 = 1e-10;

/// Iterations of Dantzig pricing before falling back to Bland's rule.
const BLAND_AFTER: usize = 1_000;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: DVector<f64>,
    pub objective: f64,
}

struct Tableau {
    /// m×(n+m+1): original columns, artificial identity, rhs.
    tab: DMatrix<f64>,
    /// Reduced-cost row, one entry per tableau column.
    z: Vec<f64>,
    basis: Vec<usize>,
    m: usize,
    n: usize,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.n + self.m
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.rhs_col() + 1;
        let piv = self.tab[(row, col)];
        for j in 0..w {
            self.tab[(row, j)] /= piv;
        }
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.tab[(i, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.tab[(i, j)] -= f * self.tab[(row, j)];
            }
        }
        let f = self.z[col];
        if f != 0.0 {
            for j in 0..w {
                self.z[j] -= f * self.tab[(row, j)];
            }
        }
        self.basis[row] = col;
    }

    /// Runs pricing/ratio-test/pivot until optimal over columns [0, scan).
    fn iterate(&mut self, scan: usize, context: &'static str) -> Result<()> {
        let max_iter = 50_000 + 50 * (scan + self.m);
        for iter in 0..max_iter {
            let entering = if iter < BLAND_AFTER {
                // Dantzig: most negative reduced cost, smallest index wins ties.
                let mut best = -RC_EPS;
                let mut pick = None;
                for (j, &rc) in self.z[..scan].iter().enumerate() {
                    if rc < best {
                        best = rc;
                        pick = Some(j);
                    }
                }
                pick
            } else {
                self.z[..scan].iter().position(|&rc| rc < -RC_EPS)
            };
            let Some(col) = entering else {
                return Ok(());
            };
            let rhs = self.rhs_col();
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.tab[(i, col)];
                if a > PIVOT_EPS {
                    let ratio = self.tab[(i, rhs)] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-15
                                || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::LpFailure {
                    reason: format!("{context}: unbounded descent direction"),
                });
            };
            self.pivot(row, col);
        }
        Err(Error::NonConvergence {
            context: "simplex iteration",
            iterations: max_iter,
        })
    }
}

/// Solves min cᵀλ s.t. columns·λ = rhs, λ ≥ 0. Returns None when
/// infeasible.
pub fn minimize(
    columns: &DMatrix<f64>,
    rhs: &DVector<f64>,
    cost: &DVector<f64>,
) -> Result<Option<LpSolution>> {
    let m = columns.nrows();
    let n = columns.ncols();
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "columns",
            reason: "no constraint rows".into(),
        });
    }
    if rhs.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: rhs.len(),
        });
    }
    if cost.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: cost.len(),
        });
    }
    if !columns.iter().all(|v| v.is_finite())
        || !rhs.iter().all(|v| v.is_finite())
        || !cost.iter().all(|v| v.is_finite())
    {
        return Err(Error::NonFinite {
            context: "linear program data",
        });
    }

    // Build with nonnegative rhs so the artificial basis is feasible.
    let mut tab = DMatrix::zeros(m, n + m + 1);
    for i in 0..m {
        let flip = if rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[(i, j)] = flip * columns[(i, j)];
        }
        tab[(i, n + i)] = 1.0;
        tab[(i, n + m)] = flip * rhs[i];
    }
    // Phase-1 reduced costs under cost = Σ artificials, basis = artificials.
    let mut z = vec![0.0; n + m + 1];
    for (j, zj) in z.iter_mut().enumerate() {
        if j >= n && j < n + m {
            continue;
        }
        let mut acc = 0.0;
        for i in 0..m {
            acc += tab[(i, j)];
        }
        *zj = -acc;
    }
    let mut t = Tableau {
        tab,
        z,
        basis: (n..n + m).collect(),
        m,
        n,
    };

    // Phase 1 scans every column; artificials may re-enter, which keeps the
    // optimality condition exact.
    t.iterate(n + m, "phase 1")?;
    let rhs_col = t.rhs_col();
    let feas_tol = 1e-8 * (1.0 + rhs.amax());
    if -t.z[rhs_col] > feas_tol {
        return Ok(None);
    }
    // Drive artificials out of the basis; rows with no eligible pivot are
    // redundant and get zeroed in place.
    for row in 0..m {
        if t.basis[row] < n {
            continue;
        }
        let col = (0..n).find(|&j| t.tab[(row, j)].abs() > PIVOT_EPS);
        match col {
            Some(c) => t.pivot(row, c),
            None => {
                for j in 0..=rhs_col {
                    t.tab[(row, j)] = 0.0;
                }
            }
        }
    }

    // Phase 2: rebuild reduced costs for the real objective.
    let mut z = vec![0.0; n + m + 1];
    for (j, zj) in z.iter_mut().enumerate().take(n) {
        *zj = cost[j];
    }
    for i in 0..m {
        let b = t.basis[i];
        if b >= n {
            continue;
        }
        let cb = cost[b];
        if cb == 0.0 {
            continue;
        }
        for j in 0..=rhs_col {
            z[j] -= cb * t.tab[(i, j)];
        }
    }
    t.z = z;
    t.iterate(n, "phase 2")?;

    let mut x = DVector::zeros(n);
    for i in 0..m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.tab[(i, rhs_col)].max(0.0);
        }
    }
    let objective = cost.dot(&x);
    Ok(Some(LpSolution { x, objective }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_tiny_lp() {
        // min x + y s.t. x + 2y = 4: optimum (0, 2), objective 2.
        let columns = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        let rhs = DVector::from_vec(vec![4.0]);
        let cost = DVector::from_vec(vec![1.0, 1.0]);
        let sol = minimize(&columns, &rhs, &cost).unwrap().unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
        assert!((sol.x[0] - 0.0).abs() < 1e-12);
        assert!((sol.x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasibility() {
        // 0·x = 1 has no solution.
        let columns = DMatrix::from_row_slice(1, 1, &[0.0]);
        let rhs = DVector::from_vec(vec![1.0]);
        let cost = DVector::from_vec(vec![1.0]);
        assert!(minimize(&columns, &rhs, &cost).unwrap().is_none());
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // min x s.t. −x = −3: x = 3.
        let columns = DMatrix::from_row_slice(1, 1, &[-1.0]);
        let rhs = DVector::from_vec(vec![-3.0]);
        let cost = DVector::from_vec(vec![1.0]);
        let sol = minimize(&columns, &rhs, &cost).unwrap().unwrap();
        assert!((sol.x[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn handles_redundant_rows() {
        // Duplicate constraints: x + y = 2 stated twice.
        let columns = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let rhs = DVector::from_vec(vec![2.0, 2.0]);
        let cost = DVector::from_vec(vec![1.0, 3.0]);
        let sol = minimize(&columns, &rhs, &cost).unwrap().unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn multi_row_lp_with_degenerate_ties() {
        // min Σλ over the 2-d cross-polytope columns reaching (1, 1):
        // needs λ_{e1} = λ_{e2} = 1, objective 2.
        let columns = DMatrix::from_row_slice(
            2,
            4,
            &[1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0],
        );
        let rhs = DVector::from_vec(vec![1.0, 1.0]);
        let cost = DVector::from_vec(vec![1.0; 4]);
        let sol = minimize(&columns, &rhs, &cost).unwrap().unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
    }
}
