//! The covering LP `min Σx_j s.t. Σ_{j∈J} x_j ≥ h_J` over proper subsets,
//! its packing dual, and exact enumeration of the dual polytope's vertices.

pub mod simplex;
mod vertices;

pub use vertices::{enumerate_dual_vertices, vertex_maximum, DualVertex};

use std::collections::{BTreeMap, BTreeSet};

use crate::entropy::{EntropyProfile, SubsetMask};
use crate::error::{Error, Result};
use crate::states::JointDistribution;
use simplex::StandardForm;

/// Slack allowed when pinning earlier coordinates during lexicographic
/// tie-breaking.
const LEX_SLACK: f64 = 1e-11;
const TIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringLP {
    profile: EntropyProfile,
}

impl CoveringLP {
    pub fn new(profile: EntropyProfile) -> Self {
        Self { profile }
    }

    /// Right-hand sides `h_J = H(A_J | A_J̄)_P`.
    pub fn from_distribution(p: &JointDistribution) -> Result<Self> {
        Ok(Self::new(EntropyProfile::conditional_shannon(p)?))
    }

    pub fn k(&self) -> usize {
        self.profile.k()
    }

    pub fn profile(&self) -> &EntropyProfile {
        &self.profile
    }

    fn constraints(&self) -> Vec<SubsetMask> {
        SubsetMask::proper(self.k()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub tight_constraints: BTreeSet<SubsetMask>,
    /// Dual weights `y_J`.
    pub certificate: BTreeMap<SubsetMask, f64>,
}

impl LpSolution {
    pub fn dual_objective(&self, profile: &EntropyProfile) -> f64 {
        self.certificate.iter().map(|(&m, y)| y * profile.get(m)).sum()
    }
}

fn tight_set(lp: &CoveringLP, x: &[f64]) -> BTreeSet<SubsetMask> {
    lp.constraints()
        .into_iter()
        .filter(|&m| m.sites().map(|j| x[j]).sum::<f64>() - lp.profile.get(m) <= TIGHT_TOL)
        .collect()
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-13 {
        0.0
    } else {
        v
    }
}

/// Solves the covering LP. Among optimal points, returns the
/// lexicographically smallest `x`.
pub fn solve_primal(lp: &CoveringLP) -> Result<LpSolution> {
    let k = lp.k();
    let masks = lp.constraints();
    let p = masks.len();
    // columns: x_0..x_{k-1}, surplus s_J, then extra slacks for pinning rows
    let base_rows: Vec<Vec<f64>> = masks
        .iter()
        .enumerate()
        .map(|(r, m)| {
            let mut row = vec![0.0; k + p];
            for j in m.sites() {
                row[j] = 1.0;
            }
            row[k + r] = -1.0;
            row
        })
        .collect();
    let b: Vec<f64> = masks.iter().map(|&m| lp.profile.get(m)).collect();
    let mut c = vec![0.0; k + p];
    c[..k].fill(1.0);

    let first = simplex::solve(&StandardForm {
        a: base_rows.clone(),
        b: b.clone(),
        c,
    })?;
    let certificate = masks
        .iter()
        .zip(&first.duals)
        .map(|(&m, &y)| (m, clean(y).max(0.0)))
        .collect();

    // Pinning rows: Σx ≤ v + τ, then x_l ≤ x_l* + τ for each decided l.
    let mut pins: Vec<(Vec<f64>, f64)> = vec![(vec![1.0; k], first.objective + LEX_SLACK)];
    let mut x = vec![0.0; k];
    for i in 0..k {
        let extra = pins.len();
        let width = k + p + extra;
        let mut a: Vec<Vec<f64>> = base_rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.resize(width, 0.0);
                r
            })
            .collect();
        let mut rhs = b.clone();
        for (e, (coef, bound)) in pins.iter().enumerate() {
            let mut row = vec![0.0; width];
            row[..k].copy_from_slice(coef);
            row[k + p + e] = 1.0;
            a.push(row);
            rhs.push(*bound);
        }
        let mut c = vec![0.0; width];
        c[i] = 1.0;
        let sol = simplex::solve(&StandardForm { a, b: rhs, c })?;
        x[i] = sol.x[i];
        let mut coef = vec![0.0; k];
        coef[i] = 1.0;
        pins.push((coef, x[i] + LEX_SLACK));
    }
    let x: Vec<f64> = x.into_iter().map(clean).collect();
    Ok(LpSolution {
        objective: x.iter().sum(),
        tight_constraints: tight_set(lp, &x),
        x,
        certificate,
    })
}

/// Solves the packing LP `max Σ h_J y_J s.t. Σ_{J∋j} y_J ≤ 1, y ≥ 0` and
/// reads the covering solution off its duals.
pub fn solve_dual(lp: &CoveringLP) -> Result<LpSolution> {
    let k = lp.k();
    let masks = lp.constraints();
    let p = masks.len();
    let a: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut row: Vec<f64> = masks.iter().map(|m| if m.contains(j) { 1.0 } else { 0.0 }).collect();
            row.resize(p + k, 0.0);
            row[p + j] = 1.0;
            row
        })
        .collect();
    let mut c: Vec<f64> = masks.iter().map(|&m| -lp.profile.get(m)).collect();
    c.resize(p + k, 0.0);
    let sol = simplex::solve(&StandardForm {
        a,
        b: vec![1.0; k],
        c,
    })?;
    let x: Vec<f64> = sol.duals.iter().map(|u| clean(-u).max(0.0)).collect();
    Ok(LpSolution {
        objective: -sol.objective,
        tight_constraints: tight_set(lp, &x),
        x,
        certificate: masks
            .iter()
            .zip(&sol.x)
            .map(|(&m, &y)| (m, clean(y)))
            .collect(),
    })
}

/// Optimum of the covering LP for a profile that depends only on `|J|`:
/// `k · max_{1≤j≤k−1} h_{[j]} / j`.
pub fn symmetric_optimum(profile: &EntropyProfile) -> Result<f64> {
    let k = profile.k();
    for m in SubsetMask::proper(k) {
        let reference = profile.get(SubsetMask::full(m.len()));
        if (profile.get(m) - reference).abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "profile is not symmetric: h{m} = {} but h_[{}] = {reference}",
                profile.get(m),
                m.len()
            )));
        }
    }
    let best = (1..k)
        .map(|j| profile.get(SubsetMask::full(j)) / j as f64)
        .fold(0.0, f64::max);
    Ok(k as f64 * best)
}
