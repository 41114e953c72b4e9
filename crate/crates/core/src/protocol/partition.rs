//! Random set partitions of each site's index set, per-outcome collision
//! graphs, and the free diagonals read off from them.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::states::{IndexTuple, SupportSet};

/// Independent uniform labels `I_j → {0, …, M_j − 1}`.
///
/// Labels are never stored: `label(j, i)` is a pure function of
/// `(seed, j, i)`, which keeps exponentially large `M_j` and `|I_j|` cheap and
/// makes every evaluation order produce the same family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionFamily {
    dims: Vec<usize>,
    m: Vec<u64>,
    seed: u64,
}

pub fn sample_partitions(dims: &[usize], m: &[u64], seed: u64) -> Result<PartitionFamily> {
    if dims.len() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            got: m.len(),
        });
    }
    if m.contains(&0) {
        return Err(Error::Validation("partition counts must be ≥ 1".into()));
    }
    Ok(PartitionFamily {
        dims: dims.to_vec(),
        m: m.to_vec(),
        seed,
    })
}

impl PartitionFamily {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn counts(&self) -> &[u64] {
        &self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self, site: usize, index: usize) -> u64 {
        CounterRng::stream(self.seed, &[site as u64, index as u64]).below(self.m[site])
    }

    /// All labels of one site.
    pub fn labels(&self, site: usize) -> Vec<u64> {
        (0..self.dims[site]).map(|i| self.label(site, i)).collect()
    }

    /// `W_{j,c}`: indices of site `j` carrying label `c`.
    pub fn cell(&self, site: usize, label: u64) -> Vec<usize> {
        (0..self.dims[site]).filter(|&i| self.label(site, i) == label).collect()
    }

    /// The measurement outcome `(m_1, …, m_k)` under which `idx` survives.
    pub fn outcome(&self, idx: &[usize]) -> Vec<u64> {
        idx.iter().enumerate().map(|(j, &i)| self.label(j, i)).collect()
    }
}

/// A flag value: an outcome tuple, or the merged failure symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeKey {
    Cell(Vec<u64>),
    Failure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionGraph {
    pub outcome: Vec<u64>,
    pub vertices: Vec<IndexTuple>,
    /// Index pairs `(a, b)` with `a < b` into `vertices`.
    pub edges: Vec<(usize, usize)>,
}

impl CollisionGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }
}

/// `G_m` on `V_m = Φ ∩ (W_{1,m_1} × ⋯ × W_{k,m_k})`; two tuples are adjacent
/// when they agree in some coordinate.
pub fn collision_graph(phi: &SupportSet, pf: &PartitionFamily, m: &[u64]) -> Result<CollisionGraph> {
    if m.len() != phi.k() || m.iter().zip(pf.counts()).any(|(a, b)| a >= b) {
        return Err(Error::Validation(format!("outcome {m:?} is out of range")));
    }
    let vertices: Vec<IndexTuple> = phi
        .elements()
        .iter()
        .filter(|e| pf.outcome(e) == m)
        .cloned()
        .collect();
    let mut edges = BTreeSet::new();
    for j in 0..phi.k() {
        let mut buckets: HashMap<usize, Vec<usize>> = HashMap::new();
        for (v, e) in vertices.iter().enumerate() {
            buckets.entry(e[j]).or_default().push(v);
        }
        for members in buckets.values() {
            for (a, &u) in members.iter().enumerate() {
                for &w in &members[a + 1..] {
                    edges.insert((u.min(w), u.max(w)));
                }
            }
        }
    }
    Ok(CollisionGraph {
        outcome: m.to_vec(),
        vertices,
        edges: edges.into_iter().collect(),
    })
}

/// Degree-zero vertices of `g`.
pub fn isolated_vertices(g: &CollisionGraph) -> FreeDiagonal {
    let mut touched = vec![false; g.vertices.len()];
    for &(a, b) in &g.edges {
        touched[a] = true;
        touched[b] = true;
    }
    FreeDiagonal {
        elements: g
            .vertices
            .iter()
            .zip(touched)
            .filter(|(_, t)| !t)
            .map(|(v, _)| v.clone())
            .collect(),
    }
}

/// Flags which members of one group share no coordinate with another
/// member, using one occupancy count per coordinate value.
pub(crate) fn isolated_flags(group: &[&[usize]]) -> Vec<bool> {
    if group.len() == 1 {
        return vec![true];
    }
    let k = group[0].len();
    let counts: Vec<HashMap<usize, u32>> = (0..k)
        .map(|j| {
            let mut c = HashMap::new();
            for e in group {
                *c.entry(e[j]).or_insert(0) += 1;
            }
            c
        })
        .collect();
    group
        .iter()
        .map(|e| (0..k).all(|j| counts[j][&e[j]] == 1))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeDiagonal {
    elements: BTreeSet<IndexTuple>,
}

impl FreeDiagonal {
    pub fn new(elements: impl IntoIterator<Item = IndexTuple>) -> Self {
        Self {
            elements: elements.into_iter().collect(),
        }
    }

    pub fn elements(&self) -> &BTreeSet<IndexTuple> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// No two elements share a coordinate.
    pub fn is_diagonal(&self) -> bool {
        let Some(first) = self.elements.iter().next() else {
            return true;
        };
        (0..first.len()).all(|j| {
            let mut seen = HashSet::new();
            self.elements.iter().all(|e| seen.insert(e[j]))
        })
    }

    /// `Γ = V ∩ (π_1(Γ) × ⋯ × π_k(Γ))`.
    pub fn is_free_in<'a>(&self, v: impl IntoIterator<Item = &'a IndexTuple>) -> bool {
        let Some(first) = self.elements.iter().next() else {
            return true;
        };
        let proj: Vec<HashSet<usize>> = (0..first.len())
            .map(|j| self.elements.iter().map(|e| e[j]).collect())
            .collect();
        v.into_iter().all(|e| {
            let inside = e.iter().enumerate().all(|(j, i)| proj[j].contains(i));
            !inside || self.elements.contains(e)
        })
    }

    /// Both machine checks against the vertex set it was extracted from.
    pub fn verify<'a>(&self, v: impl IntoIterator<Item = &'a IndexTuple>) -> Result<()> {
        if !self.is_diagonal() {
            return Err(Error::Precondition("extracted set is not a diagonal".into()));
        }
        if !self.is_free_in(v) {
            return Err(Error::Precondition("extracted diagonal is not free".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, w};

    #[test]
    fn unit_counts_give_one_outcome() {
        let pf = sample_partitions(&[4, 4, 4], &[1, 1, 1], 7).unwrap();
        for j in 0..3 {
            assert!(pf.labels(j).iter().all(|&l| l == 0));
        }
    }

    #[test]
    fn labels_are_seeded() {
        let a = sample_partitions(&[50, 50], &[7, 3], 11).unwrap();
        let b = sample_partitions(&[50, 50], &[7, 3], 11).unwrap();
        let c = sample_partitions(&[50, 50], &[7, 3], 12).unwrap();
        assert_eq!(a.labels(0), b.labels(0));
        assert_ne!(a.labels(0), c.labels(0));
        assert!(a.labels(0).iter().all(|&l| l < 7));
    }

    #[test]
    fn ghz_graphs_have_no_edges() {
        let phi = ghz(5, 3).unwrap().support();
        let pf = sample_partitions(&[5, 5, 5], &[2, 2, 2], 3).unwrap();
        for e in phi.elements() {
            let g = collision_graph(&phi, &pf, &pf.outcome(e)).unwrap();
            assert!(g.edges.is_empty());
            assert_eq!(isolated_vertices(&g).len(), g.vertices.len());
        }
    }

    #[test]
    fn w3_single_cell_is_a_triangle() {
        let phi = w(3).unwrap().support();
        let pf = sample_partitions(&[2, 2, 2], &[1, 1, 1], 0).unwrap();
        let g = collision_graph(&phi, &pf, &[0, 0, 0]).unwrap();
        assert_eq!(g.edges, vec![(0, 1), (0, 2), (1, 2)]);
        assert!(isolated_vertices(&g).is_empty());
        assert!((0..3).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn singleton_vertex_set() {
        let phi = SupportSet::new(vec![2, 2], [vec![0, 1]]).unwrap();
        let pf = sample_partitions(&[2, 2], &[1, 1], 0).unwrap();
        let g = collision_graph(&phi, &pf, &[0, 0]).unwrap();
        let gamma = isolated_vertices(&g);
        assert_eq!(gamma.len(), 1);
        gamma.verify(&g.vertices).unwrap();
    }

    #[test]
    fn bucket_flags_agree_with_edges() {
        let phi = SupportSet::new(
            vec![3, 3, 3],
            [vec![0, 0, 1], vec![1, 2, 0], vec![2, 1, 1], vec![0, 1, 2], vec![2, 2, 2]],
        )
        .unwrap();
        let pf = sample_partitions(&[3, 3, 3], &[1, 1, 1], 0).unwrap();
        let g = collision_graph(&phi, &pf, &[0, 0, 0]).unwrap();
        let refs: Vec<&[usize]> = g.vertices.iter().map(|v| v.as_slice()).collect();
        let flags = isolated_flags(&refs);
        for (v, f) in flags.iter().enumerate() {
            assert_eq!(*f, g.degree(v) == 0);
        }
    }

    #[test]
    fn free_check_detects_violation() {
        // (0,0),(1,1) is diagonal, but (0,1) lies in the product of its projections
        let v = [vec![0, 0], vec![1, 1], vec![0, 1]];
        let d = FreeDiagonal::new([vec![0, 0], vec![1, 1]]);
        assert!(d.is_diagonal());
        assert!(!d.is_free_in(&v));
        assert!(FreeDiagonal::new([vec![0, 0], vec![0, 1]]).verify(&v).is_err());
    }
}
