//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Solves `min c·x  s.t.  A x = b, x ≥ 0`. Artificial columns are retained
//! after phase 1 (barred from re-entering) so that `B⁻¹` can be read off the
//! tableau and the dual solution recovered.

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-11;
const PHASE1_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Optimal `y` of `max b·y s.t. Aᵀy ≤ c`.
    pub duals: Vec<f64>,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n: usize,
    m: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.n + self.m]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        self.basis[r] = col;
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        cost[j]
            - self
                .basis
                .iter()
                .enumerate()
                .map(|(i, &bi)| cost[bi] * self.rows[i][j])
                .sum::<f64>()
    }

    /// Runs simplex iterations over columns `0..allowed`. Returns `false`
    /// if the objective is unbounded below.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j) < -PIVOT_TOL);
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.rows[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - PIVOT_TOL
                                || (ratio <= br + PIVOT_TOL && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Ok(false);
            };
            self.pivot(r, col);
        }
        Err(Error::Precondition("simplex pivot limit reached".into()))
    }
}

/// Returns [`Error::Infeasible`] when `Ax = b, x ≥ 0` has no solution and
/// [`Error::Precondition`] when the objective is unbounded.
pub fn solve(lp: &StandardForm) -> Result<SimplexSolution> {
    let m = lp.b.len();
    let n = lp.c.len();
    if lp.a.len() != m || lp.a.iter().any(|r| r.len() != n) {
        return Err(Error::Validation("constraint matrix shape mismatch".into()));
    }
    let sign: Vec<f64> = lp.b.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
    let rows = (0..m)
        .map(|i| {
            let mut row = vec![0.0; n + m + 1];
            for (dst, &src) in row.iter_mut().zip(&lp.a[i]) {
                *dst = sign[i] * src;
            }
            row[n + i] = 1.0;
            row[n + m] = sign[i] * lp.b[i];
            row
        })
        .collect();
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        n,
        m,
    };

    let phase1: Vec<f64> = (0..n + m).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    t.optimize(&phase1, n + m)?;
    let infeas: f64 = (0..m).filter(|&i| t.basis[i] >= n).map(|i| t.rhs(i)).sum();
    if infeas > PHASE1_TOL {
        return Err(Error::Infeasible);
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // with no structural entry are redundant and keep their artificial.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t.basis.contains(&j) && t.rows[i][j].abs() > PHASE1_TOL) {
                t.pivot(i, j);
            }
        }
    }

    let mut cost = lp.c.clone();
    cost.resize(n + m, 0.0);
    if !t.optimize(&cost, n)? {
        return Err(Error::Precondition("linear program is unbounded".into()));
    }

    let mut x = vec![0.0; n];
    for i in 0..m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let objective = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
    let duals = (0..m)
        .map(|i| {
            let y: f64 = (0..m).map(|r| cost[t.basis[r]] * t.rows[r][n + i]).sum();
            sign[i] * y
        })
        .collect();
    Ok(SimplexSolution { x, objective, duals })
}
