//! Maximum conditional entropy over distributions on a fixed support with
//! prescribed single-site marginals.
//!
//! Conditional entropy is concave in the joint distribution, so we run
//! Frank–Wolfe with away steps. The linear oracle is the simplex solver over
//! the transportation-style polytope `{Q ≥ 0 on Ψ : Q_j = P_j ∀j}`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lp::simplex::{self, StandardForm};
use crate::states::{IndexTuple, JointDistribution, SupportSet};

use super::{conditional_shannon, SubsetMask};

/// Stop once the Frank–Wolfe duality gap falls below this.
pub const FW_GAP_TOL: f64 = 1e-7;
pub const FW_MAX_ITER: usize = 10_000;

const LOG_FLOOR: f64 = 1e-300;
const BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntResult {
    pub value: f64,
    pub optimizer: JointDistribution,
    pub iterations: usize,
    /// Final duality gap; an upper bound on `optimum − value`.
    pub gap: f64,
}

struct Problem {
    lp: StandardForm,
    groups: Vec<usize>,
    n_groups: usize,
}

impl Problem {
    fn gradient(&self, q: &[f64]) -> Vec<f64> {
        let mut bar = vec![0.0; self.n_groups];
        for (i, &g) in self.groups.iter().enumerate() {
            bar[g] += q[i];
        }
        q.iter()
            .zip(&self.groups)
            .map(|(&qi, &g)| (bar[g].max(LOG_FLOOR) / qi.max(LOG_FLOOR)).log2())
            .collect()
    }

    /// A vertex maximizing `g · Q`.
    fn oracle(&self, g: &[f64]) -> Result<Vec<f64>> {
        let lp = StandardForm {
            c: g.iter().map(|v| -v).collect(),
            ..self.lp.clone()
        };
        Ok(simplex::solve(&lp)?.x)
    }

    fn directional(&self, q: &[f64], d: &[f64], gamma: f64) -> f64 {
        let point: Vec<f64> = q.iter().zip(d).map(|(a, b)| (a + gamma * b).max(0.0)).collect();
        dot(&self.gradient(&point), d)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn validate(psi: &SupportSet, marginals: &[Vec<f64>], j: SubsetMask) -> Result<()> {
    let k = psi.k();
    if marginals.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: marginals.len(),
        });
    }
    for (site, m) in marginals.iter().enumerate() {
        if m.len() != psi.dims()[site] {
            return Err(Error::DimensionMismatch {
                expected: psi.dims()[site],
                got: m.len(),
            });
        }
        let total: f64 = m.iter().sum();
        if m.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "marginal of site {} is not a probability vector",
                site + 1
            )));
        }
    }
    if j.is_empty() || j.0 & !SubsetMask::full(k).0 != 0 {
        return Err(Error::Validation(format!("subset {j} is not a nonempty subset of [{k}]")));
    }
    Ok(())
}

/// Maximizes `H(A_J | A_J̄)_Q` over `Q` supported in `Ψ` with `Q_j = P_j`
/// for every site `j`. `J = [k]` maximizes the joint entropy.
pub fn maximize_conditional_entropy(
    psi: &SupportSet,
    marginals: &[Vec<f64>],
    j: SubsetMask,
) -> Result<MaxEntResult> {
    validate(psi, marginals, j)?;
    let k = psi.k();
    let elems: Vec<&IndexTuple> = psi.elements().iter().collect();
    let n = elems.len();

    let mut a = Vec::new();
    let mut b = Vec::new();
    for (site, m) in marginals.iter().enumerate() {
        for (sym, &p) in m.iter().enumerate() {
            a.push(elems.iter().map(|e| if e[site] == sym { 1.0 } else { 0.0 }).collect());
            b.push(p);
        }
    }
    let rest: Vec<usize> = j.complement(k).sites().collect();
    let mut group_ids: BTreeMap<IndexTuple, usize> = BTreeMap::new();
    let groups = elems
        .iter()
        .map(|e| {
            let key: IndexTuple = rest.iter().map(|&s| e[s]).collect();
            let next = group_ids.len();
            *group_ids.entry(key).or_insert(next)
        })
        .collect();
    let prob = Problem {
        lp: StandardForm {
            a,
            b,
            c: vec![0.0; n],
        },
        groups,
        n_groups: group_ids.len(),
    };

    // Relative-interior start: average of per-coordinate maximizers.
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let v = prob.oracle(&e)?;
        if v[i] > 1e-12 && !vertices.iter().any(|w| same(w, &v)) {
            vertices.push(v);
        }
    }
    if vertices.is_empty() {
        return Err(Error::Infeasible);
    }
    let mut weights = vec![1.0 / vertices.len() as f64; vertices.len()];
    let mut q = vec![0.0; n];
    for v in &vertices {
        for (qi, vi) in q.iter_mut().zip(v) {
            *qi += vi / vertices.len() as f64;
        }
    }

    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < FW_MAX_ITER {
        let g = prob.gradient(&q);
        let s = prob.oracle(&g)?;
        let gq = dot(&g, &q);
        gap = dot(&g, &s) - gq;
        if gap < FW_GAP_TOL {
            break;
        }
        iterations += 1;
        let (away, away_val) = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (i, dot(&g, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("active set is nonempty");
        let away_gap = gq - away_val;

        let fw_step = gap >= away_gap;
        let (d, gamma_max): (Vec<f64>, f64) = if fw_step {
            (s.iter().zip(&q).map(|(a, b)| a - b).collect(), 1.0)
        } else {
            let w = weights[away];
            let d = q.iter().zip(&vertices[away]).map(|(a, b)| a - b).collect();
            (d, if w < 1.0 { w / (1.0 - w) } else { f64::INFINITY })
        };
        let gamma = line_search(&prob, &q, &d, gamma_max);

        for (qi, di) in q.iter_mut().zip(&d) {
            *qi = (*qi + gamma * di).max(0.0);
        }
        if fw_step {
            for w in weights.iter_mut() {
                *w *= 1.0 - gamma;
            }
            match vertices.iter().position(|v| same(v, &s)) {
                Some(i) => weights[i] += gamma,
                None => {
                    vertices.push(s);
                    weights.push(gamma);
                }
            }
        } else {
            for w in weights.iter_mut() {
                *w *= 1.0 + gamma;
            }
            weights[away] -= gamma;
        }
        let mut i = 0;
        while i < vertices.len() {
            if weights[i] <= 1e-15 && vertices.len() > 1 {
                vertices.swap_remove(i);
                weights.swap_remove(i);
            } else {
                i += 1;
            }
        }
    }

    let optimizer = JointDistribution::from_weights(
        psi.dims().to_vec(),
        elems.iter().zip(&q).map(|(e, &p)| ((*e).clone(), p)),
    )?;
    let value = conditional_shannon(&optimizer, j)?;
    Ok(MaxEntResult {
        value,
        optimizer,
        iterations,
        gap,
    })
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
}

/// Exact line search on the concave restriction `γ ↦ f(Q + γd)` by
/// bisection on its derivative.
fn line_search(prob: &Problem, q: &[f64], d: &[f64], gamma_max: f64) -> f64 {
    let mut hi = if gamma_max.is_finite() { gamma_max } else { 1.0 };
    if gamma_max.is_infinite() {
        while prob.directional(q, d, hi) > 0.0 && hi < 1e6 {
            hi *= 2.0;
        }
    } else if prob.directional(q, d, hi) >= 0.0 {
        return hi;
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if prob.directional(q, d, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
