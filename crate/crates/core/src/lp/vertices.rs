//! Exact enumeration of the vertices of `{y ≥ 0 : Σ_{J∋j} y_J = 1 ∀j}`.
//!
//! Every vertex is a basic feasible solution, so we try every choice of `k`
//! columns, solve the `k × k` system in rationals, and keep nonnegative
//! solutions. `k = 4` means C(14, 4) = 1001 bases.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;

use crate::entropy::{EntropyProfile, SubsetMask};
use crate::error::{Error, Result};
use crate::states::next_permutation;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DualVertex {
    k: usize,
    weights: BTreeMap<SubsetMask, Rational64>,
}

impl DualVertex {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Nonzero weights only.
    pub fn weights(&self) -> &BTreeMap<SubsetMask, Rational64> {
        &self.weights
    }

    pub fn weight(&self, mask: SubsetMask) -> Rational64 {
        self.weights.get(&mask).copied().unwrap_or_default()
    }

    /// `Σ_J h_J y_J`.
    pub fn value(&self, profile: &EntropyProfile) -> f64 {
        self.weights
            .iter()
            .map(|(&m, y)| profile.get(m) * (*y.numer() as f64 / *y.denom() as f64))
            .sum()
    }

    /// False when two disjoint supported subsets fail to cover `[k]`; such
    /// vertices are dominated whenever `h` comes from an actual distribution.
    pub fn passes_ssa_filter(&self) -> bool {
        let full = SubsetMask::full(self.k).0;
        let support: Vec<u32> = self.weights.keys().map(|m| m.0).collect();
        !support.iter().enumerate().any(|(i, &a)| {
            support[i + 1..]
                .iter()
                .any(|&b| a & b == 0 && a | b != full)
        })
    }

    /// Relabels parties `j ↦ perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            k: self.k,
            weights: self.weights.iter().map(|(m, &y)| (m.permuted(perm), y)).collect(),
        }
    }

    /// The smallest member of the orbit under party permutations, as a
    /// dense weight vector in mask order.
    pub fn orbit_key(&self) -> Vec<Rational64> {
        let mut perm: Vec<usize> = (0..self.k).collect();
        let mut best: Option<Vec<Rational64>> = None;
        loop {
            let p = self.permuted(&perm);
            let dense: Vec<Rational64> = SubsetMask::proper(self.k).map(|m| p.weight(m)).collect();
            if best.as_ref().is_none_or(|b| dense < *b) {
                best = Some(dense);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.expect("at least the identity permutation")
    }
}

fn solve_exact(mut a: Vec<Vec<Rational64>>, mut b: Vec<Rational64>) -> Option<Vec<Rational64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != Rational64::default())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r][col] != Rational64::default() {
                let f = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, &v) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * v;
                }
                let v = b[col];
                b[r] -= f * v;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// All vertices of the packing polytope, sorted; with `ssa_filter` the
/// dominated ones are dropped. Supported for `k ∈ {2, 3, 4}`.
pub fn enumerate_dual_vertices(k: usize, ssa_filter: bool) -> Result<Vec<DualVertex>> {
    if !(2..=4).contains(&k) {
        return Err(Error::UnsupportedK {
            k,
            reason: "exhaustive vertex enumeration is limited to k ∈ {2, 3, 4}",
        });
    }
    let masks: Vec<SubsetMask> = SubsetMask::proper(k).collect();
    let zero = Rational64::default();
    let one = Rational64::from_integer(1);
    let mut found = BTreeSet::new();
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let a: Vec<Vec<Rational64>> = (0..k)
            .map(|j| pick.iter().map(|&c| if masks[c].contains(j) { one } else { zero }).collect())
            .collect();
        if let Some(y) = solve_exact(a, vec![one; k]) {
            if y.iter().all(|v| *v >= zero) {
                let weights = pick
                    .iter()
                    .zip(y)
                    .filter(|(_, v)| *v != zero)
                    .map(|(&c, v)| (masks[c], v))
                    .collect();
                found.insert(DualVertex { k, weights });
            }
        }
        // next k-combination of 0..masks.len()
        let Some(i) = (0..k).rev().find(|&i| pick[i] < masks.len() - k + i) else {
            break;
        };
        pick[i] += 1;
        for t in i + 1..k {
            pick[t] = pick[t - 1] + 1;
        }
    }
    Ok(found
        .into_iter()
        .filter(|v| !ssa_filter || v.passes_ssa_filter())
        .collect())
}

/// `max_y Σ h_J y_J` over the enumerated vertices.
pub fn vertex_maximum(profile: &EntropyProfile, ssa_filter: bool) -> Result<f64> {
    Ok(enumerate_dual_vertices(profile.k(), ssa_filter)?
        .iter()
        .map(|v| v.value(profile))
        .fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_single_vertex() {
        let v = enumerate_dual_vertices(2, false).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].weight(SubsetMask(1)), Rational64::from_integer(1));
        assert_eq!(v[0].weight(SubsetMask(2)), Rational64::from_integer(1));
    }

    #[test]
    fn every_vertex_is_feasible() {
        for k in 2..=4 {
            for v in enumerate_dual_vertices(k, false).unwrap() {
                for j in 0..k {
                    let s: Rational64 = v.weights().iter().filter(|(m, _)| m.contains(j)).map(|(_, y)| *y).sum();
                    assert_eq!(s, Rational64::from_integer(1));
                }
            }
        }
    }

    #[test]
    fn k5_refused() {
        assert!(matches!(enumerate_dual_vertices(5, true), Err(Error::UnsupportedK { k: 5, .. })));
    }
}
