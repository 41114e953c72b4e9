//! Free diagonals and exact subrank of small supports.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::protocol::{meanbounds_sandwich, HomogeneousModel};
use crate::states::{IndexTuple, SupportSet};

/// Largest support accepted by [`brute_force_subrank`].
pub const BRUTE_FORCE_LIMIT: usize = 30;

/// A free diagonal together with the outcome of both checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalCertificate {
    pub elements: BTreeSet<IndexTuple>,
    pub diagonal: bool,
    pub free: bool,
}

/// True when no two elements of `s` agree in any coordinate.
pub fn is_diagonal<'a>(s: impl IntoIterator<Item = &'a IndexTuple>) -> bool {
    let mut seen: Vec<BTreeSet<usize>> = Vec::new();
    for e in s {
        if seen.len() < e.len() {
            seen.resize_with(e.len(), BTreeSet::new);
        }
        for (j, &i) in e.iter().enumerate() {
            if !seen[j].insert(i) {
                return false;
            }
        }
    }
    true
}

/// True when `Φ ∩ (π₁(S) × ⋯ × π_k(S)) = S`.
pub fn is_free(s: &BTreeSet<IndexTuple>, phi: &SupportSet) -> Result<bool> {
    if let Some(e) = s.iter().find(|e| !phi.contains(e)) {
        return Err(Error::Validation(format!("{e:?} is not in the support")));
    }
    let proj: Vec<BTreeSet<usize>> = (0..phi.k()).map(|j| s.iter().map(|e| e[j]).collect()).collect();
    Ok(phi
        .elements()
        .iter()
        .filter(|e| e.iter().enumerate().all(|(j, i)| proj[j].contains(i)))
        .all(|e| s.contains(e)))
}

impl DiagonalCertificate {
    pub fn check(elements: BTreeSet<IndexTuple>, phi: &SupportSet) -> Result<Self> {
        let diagonal = is_diagonal(&elements);
        let free = is_free(&elements, phi)?;
        Ok(Self { elements, diagonal, free })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

struct Search {
    /// Elements re-indexed per coordinate, in lexicographic order.
    elems: Vec<Vec<usize>>,
    used: Vec<Vec<bool>>,
    chosen: Vec<usize>,
    best: Vec<usize>,
}

impl Search {
    fn compatible(&self, t: usize) -> bool {
        self.elems[t].iter().enumerate().all(|(j, &i)| !self.used[j][i])
    }

    /// Every element outside the chosen set has some coordinate outside the
    /// projections. Chosen elements occupy all their coordinates, so
    /// "inside the projections" means every coordinate is marked used.
    fn free(&self) -> bool {
        self.elems
            .iter()
            .enumerate()
            .filter(|(t, _)| !self.chosen.contains(t))
            .all(|(_, e)| e.iter().enumerate().any(|(j, &i)| !self.used[j][i]))
    }

    fn set(&mut self, t: usize, v: bool) {
        for j in 0..self.elems[t].len() {
            let i = self.elems[t][j];
            self.used[j][i] = v;
        }
    }

    // Preorder with "include" explored first visits diagonals in
    // lexicographic order of their sorted element lists, so the first free
    // diagonal of a given size is the least one.
    fn dfs(&mut self, from: usize) {
        if self.chosen.len() > self.best.len() && self.free() {
            self.best = self.chosen.clone();
        }
        let remaining = (from..self.elems.len()).filter(|&t| self.compatible(t)).count();
        if self.chosen.len() + remaining <= self.best.len() {
            return;
        }
        for t in from..self.elems.len() {
            if !self.compatible(t) {
                continue;
            }
            self.set(t, true);
            self.chosen.push(t);
            self.dfs(t + 1);
            self.chosen.pop();
            self.set(t, false);
            let left = (t + 1..self.elems.len()).filter(|&u| self.compatible(u)).count();
            if self.chosen.len() + left <= self.best.len() {
                return;
            }
        }
    }
}

/// Size of the largest free diagonal in `Φ`, with the lexicographically
/// least witness of that size.
pub fn brute_force_subrank(phi: &SupportSet) -> Result<(usize, DiagonalCertificate)> {
    if phi.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            what: "support for exact subrank",
            size: phi.len() as u128,
            limit: BRUTE_FORCE_LIMIT as u128,
        });
    }
    let k = phi.k();
    let originals: Vec<&IndexTuple> = phi.elements().iter().collect();
    let mut maps: Vec<HashMap<usize, usize>> = vec![HashMap::new(); k];
    let elems: Vec<Vec<usize>> = originals
        .iter()
        .map(|e| {
            e.iter()
                .enumerate()
                .map(|(j, &i)| {
                    let next = maps[j].len();
                    *maps[j].entry(i).or_insert(next)
                })
                .collect()
        })
        .collect();
    let mut search = Search {
        used: maps.iter().map(|m| vec![false; m.len()]).collect(),
        elems,
        chosen: Vec::new(),
        best: Vec::new(),
    };
    search.dfs(0);
    let witness: BTreeSet<IndexTuple> = search.best.iter().map(|&t| originals[t].clone()).collect();
    let cert = DiagonalCertificate::check(witness, phi)?;
    debug_assert!(cert.diagonal && cert.free);
    Ok((cert.len(), cert))
}

/// Componentwise-paired product: `(i, i')` at site `j` becomes
/// `i · dim(Ψ_j) + i'`.
pub fn product_set(phi: &SupportSet, psi: &SupportSet) -> Result<SupportSet> {
    if phi.k() != psi.k() {
        return Err(Error::DimensionMismatch {
            expected: phi.k(),
            got: psi.k(),
        });
    }
    let dims: Vec<usize> = phi.dims().iter().zip(psi.dims()).map(|(a, b)| a * b).collect();
    let elems = phi.elements().iter().flat_map(|a| {
        psi.elements()
            .iter()
            .map(move |b| a.iter().zip(b).zip(psi.dims()).map(|((x, y), d)| x * d + y).collect())
    });
    SupportSet::new(dims, elems)
}

/// The isolated vertices of the full collision graph of `Φ`: a free
/// diagonal found without search.
pub fn greedy_free_diagonal(phi: &SupportSet) -> Result<DiagonalCertificate> {
    let mut counts: Vec<HashMap<usize, usize>> = vec![HashMap::new(); phi.k()];
    for e in phi.elements() {
        for (j, &i) in e.iter().enumerate() {
            *counts[j].entry(i).or_default() += 1;
        }
    }
    let isolated = phi
        .elements()
        .iter()
        .filter(|e| e.iter().enumerate().all(|(j, i)| counts[j][i] == 1))
        .cloned()
        .collect();
    DiagonalCertificate::check(isolated, phi)
}

/// `|Φ| (p_∅ − Σ_J 2^{H_max(A_J|A_J̄)} p_J)`: the expected number of isolated
/// vertices under a homogeneous random restriction, bounded from below.
pub fn homogeneous_lower_bound(phi: &SupportSet, model: &HomogeneousModel) -> Result<f64> {
    Ok(meanbounds_sandwich(phi, &|_| 1.0, model)?.0)
}
