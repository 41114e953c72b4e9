//! Conditional Rényi entropies `H_α(X|Y)` of a classical pair, and the
//! smooth min-entropy lower bounds derived from them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::states::{JointDistribution, NORM_TOL};

use super::SubsetMask;

/// A (sub)normalized joint weight table over `(x, y)` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPair {
    weights: BTreeMap<(usize, usize), f64>,
}

impl ConditionalPair {
    pub fn new(weights: impl IntoIterator<Item = ((usize, usize), f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (xy, p) in weights {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::Validation(format!("invalid weight {p} at {xy:?}")));
            }
            if p > 0.0 {
                *map.entry(xy).or_insert(0.0) += p;
            }
        }
        if map.is_empty() {
            return Err(Error::EmptySupport);
        }
        let total: f64 = map.values().sum();
        if total > 1.0 + NORM_TOL {
            return Err(Error::Validation(format!("total weight {total} exceeds 1")));
        }
        Ok(Self { weights: map })
    }

    /// `rows[x][y]`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .enumerate()
                .flat_map(|(x, row)| row.iter().enumerate().map(move |(y, &p)| ((x, y), p))),
        )
    }

    /// `X = A_J`, `Y = A_J̄`, with labels taken as mixed-radix ranks of the
    /// projected tuples.
    pub fn from_joint(p: &JointDistribution, j: SubsetMask) -> Result<Self> {
        let k = p.k();
        let xs: Vec<usize> = j.sites().filter(|&s| s < k).collect();
        let ys: Vec<usize> = j.complement(k).sites().collect();
        let rank = |idx: &[usize], sites: &[usize]| {
            sites.iter().fold(0usize, |r, &s| r * p.dims()[s] + idx[s])
        };
        Self::new(
            p.probs()
                .iter()
                .map(|(idx, &w)| ((rank(idx, &xs), rank(idx, &ys)), w)),
        )
    }

    pub fn weights(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    /// Weights grouped by `y`.
    pub fn columns(&self) -> BTreeMap<usize, Vec<f64>> {
        let mut cols: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (&(_, y), &p) in &self.weights {
            cols.entry(y).or_default().push(p);
        }
        cols
    }

    pub fn y_marginal(&self) -> BTreeMap<usize, f64> {
        self.columns()
            .into_iter()
            .map(|(y, c)| (y, c.iter().sum()))
            .collect()
    }
}

/// Shannon `H(X|Y) = Σ_y Σ_x P(x,y) log₂(P(y)/P(x,y))`.
pub fn conditional_shannon_pair(pair: &ConditionalPair) -> f64 {
    pair.columns()
        .values()
        .map(|c| {
            let py: f64 = c.iter().sum();
            c.iter().map(|&p| p * (py / p).log2()).sum::<f64>()
        })
        .sum()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "α > 1 (or ∞)",
        });
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "0 < ε ≤ 1",
        });
    }
    Ok(())
}

/// `log₂ (Σ_x p_x^α)^{1/α}` without underflow for large `α`.
fn log_alpha_norm(col: &[f64], alpha: f64) -> f64 {
    let m = col.iter().cloned().fold(0.0, f64::max);
    if alpha.is_infinite() {
        return m.log2();
    }
    let s: f64 = col.iter().map(|&p| (p / m).powf(alpha)).sum();
    m.log2() + s.log2() / alpha
}

fn log2_sum_exp2(terms: impl IntoIterator<Item = f64>) -> f64 {
    let t: Vec<f64> = terms.into_iter().collect();
    let m = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + t.iter().map(|v| (v - m).exp2()).sum::<f64>().log2()
}

/// `H↑_α(X|Y) = (α/(1−α)) log₂ Σ_y (Σ_x P(x,y)^α)^{1/α}`;
/// at `α = ∞`, `−log₂ Σ_y max_x P(x,y)`.
pub fn renyi_up(pair: &ConditionalPair, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let log_norms = pair.columns().values().map(|c| log_alpha_norm(c, alpha)).collect::<Vec<_>>();
    let l = log2_sum_exp2(log_norms);
    Ok(if alpha.is_infinite() {
        -l
    } else {
        alpha / (1.0 - alpha) * l
    })
}

/// `H↓_α(X|Y) = (1/(1−α)) log₂ Σ_{x,y} P(x,y)^α P(y)^{1−α}`;
/// at `α = ∞`, `min_y −log₂ max_x P(x|y)`.
pub fn renyi_down(pair: &ConditionalPair, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let cols = pair.columns();
    if alpha.is_infinite() {
        return Ok(cols
            .values()
            .map(|c| {
                let py: f64 = c.iter().sum();
                let m = c.iter().cloned().fold(0.0, f64::max);
                -(m / py).log2()
            })
            .fold(f64::INFINITY, f64::min));
    }
    // Σ_y P(y) Σ_x (P(x,y)/P(y))^α
    let terms = cols.values().map(|c| {
        let py: f64 = c.iter().sum();
        let s: f64 = c.iter().map(|&p| (p / py).powf(alpha)).sum();
        py.log2() + s.log2()
    });
    Ok(log2_sum_exp2(terms.collect::<Vec<_>>()) / (1.0 - alpha))
}

/// `R*(y) ∝ (Σ_x P(x,y)^α)^{1/α}`, the maximizer of
/// [`renyi_up_with_reference`] over normalized `R`.
pub fn optimal_reference(pair: &ConditionalPair, alpha: f64) -> Result<BTreeMap<usize, f64>> {
    check_alpha(alpha)?;
    let logs: BTreeMap<usize, f64> = pair
        .columns()
        .iter()
        .map(|(&y, c)| (y, log_alpha_norm(c, alpha)))
        .collect();
    let z = log2_sum_exp2(logs.values().copied());
    Ok(logs.into_iter().map(|(y, l)| (y, (l - z).exp2())).collect())
}

/// `(1/(1−α)) log₂ Σ P(x,y)^α R(y)^{1−α}` for a normalized reference `R`
/// whose support covers that of `P_Y`.
pub fn renyi_up_with_reference(
    pair: &ConditionalPair,
    alpha: f64,
    reference: &BTreeMap<usize, f64>,
) -> Result<f64> {
    check_alpha(alpha)?;
    let total: f64 = reference.values().sum();
    if reference.values().any(|r| !(*r >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::ReferenceSupport(format!(
            "reference must be a probability vector (total {total})"
        )));
    }
    let mut terms = Vec::new();
    for (y, col) in pair.columns() {
        let r = reference.get(&y).copied().unwrap_or(0.0);
        if r <= 0.0 {
            return Err(Error::ReferenceSupport(format!(
                "reference vanishes at y = {y} where P_Y > 0"
            )));
        }
        if alpha.is_infinite() {
            let m = col.iter().cloned().fold(0.0, f64::max);
            terms.push(m.log2() - r.log2());
        } else {
            for p in col {
                terms.push(alpha * p.log2() + (1.0 - alpha) * r.log2());
            }
        }
    }
    if alpha.is_infinite() {
        // lim (1/(1−α)) log Σ P^α R^{1−α} = −log max_{x,y} P/R
        return Ok(-terms.into_iter().fold(f64::NEG_INFINITY, f64::max));
    }
    Ok(log2_sum_exp2(terms) / (1.0 - alpha))
}

/// `(1/(α−1)) log₂(2/ε²)`, zero at `α = ∞`.
pub fn smoothing_penalty(alpha: f64, eps: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_eps(eps)?;
    Ok(if alpha.is_infinite() {
        0.0
    } else {
        (2.0 / (eps * eps)).log2() / (alpha - 1.0)
    })
}

/// `(1 + 1/(α−1)) log₂(10/ε²)`.
pub fn alt_smoothing_penalty(alpha: f64, eps: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_eps(eps)?;
    let base = (10.0 / (eps * eps)).log2();
    Ok(if alpha.is_infinite() {
        base
    } else {
        base * (1.0 + 1.0 / (alpha - 1.0))
    })
}

/// Lower bound on `H_min^ε(X|Y)`: `H↑_α − (1/(α−1)) log₂(2/ε²)`.
pub fn smooth_min_lb(pair: &ConditionalPair, alpha: f64, eps: f64) -> Result<f64> {
    Ok(renyi_up(pair, alpha)? - smoothing_penalty(alpha, eps)?)
}

/// The weaker variant `H↑_α − (1 + 1/(α−1)) log₂(10/ε²)`.
pub fn alt_smooth_min_lb(pair: &ConditionalPair, alpha: f64, eps: f64) -> Result<f64> {
    Ok(renyi_up(pair, alpha)? - alt_smoothing_penalty(alpha, eps)?)
}
