//! Entropy functionals, all in bits.
//!
//! Convention: `0·log 0 = 0`. Subsets of parties are bit masks; bit `j` set
//! means site `j` belongs to the subset.

mod conditional;
mod distance;
mod maxent;

pub use conditional::{
    alt_smooth_min_lb, alt_smoothing_penalty, conditional_shannon_pair, optimal_reference, renyi_down, renyi_up,
    renyi_up_with_reference, smooth_min_lb, smoothing_penalty, ConditionalPair,
};
pub use distance::{fidelity, is_majorized_by, majorizes, nielsen_convertible, purified_distance};
pub use maxent::{maximize_conditional_entropy, MaxEntResult, FW_GAP_TOL, FW_MAX_ITER};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::states::{IndexTuple, JointDistribution, SupportSet};

/// A subset `J ⊆ [k]` of parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub fn full(k: usize) -> Self {
        Self(((1u64 << k) - 1) as u32)
    }

    pub fn from_sites(sites: &[usize]) -> Self {
        Self(sites.iter().fold(0, |m, &j| m | 1 << j))
    }

    pub fn contains(self, site: usize) -> bool {
        self.0 >> site & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, k: usize) -> Self {
        Self(!self.0 & Self::full(k).0)
    }

    /// `J ≠ ∅` and `J ≠ [k]`.
    pub fn is_proper(self, k: usize) -> bool {
        self.0 != 0 && self != Self::full(k)
    }

    pub fn sites(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&j| self.contains(j))
    }

    /// All proper nonempty subsets of `[k]` in increasing mask order.
    pub fn proper(k: usize) -> impl Iterator<Item = SubsetMask> {
        (1..(1u32 << k) - 1).map(SubsetMask)
    }

    /// Image under the party relabeling `j ↦ perm[j]`.
    pub fn permuted(self, perm: &[usize]) -> Self {
        Self(self.sites().fold(0, |m, j| m | 1 << perm[j]))
    }
}

impl fmt::Display for SubsetMask {
    /// 1-based, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sites().map(|j| (j + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `h_J` for every subset `J ⊆ [k]`, indexed by mask.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    k: usize,
    values: Vec<f64>,
}

impl EntropyProfile {
    /// Builds a profile from `f(J)` on every mask (including `∅` and `[k]`).
    pub fn from_fn(k: usize, mut f: impl FnMut(SubsetMask) -> f64) -> Result<Self> {
        if !(2..=16).contains(&k) {
            return Err(Error::UnsupportedK {
                k,
                reason: "profiles need 2 ≤ k ≤ 16",
            });
        }
        let values: Vec<f64> = (0..1u32 << k).map(|m| f(SubsetMask(m))).collect();
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Validation(format!("profile value {v} is not a finite h_J ≥ 0")));
        }
        Ok(Self { k, values })
    }

    /// `h_J = H(A_J | A_J̄)_P`; tiny negative round-off is clamped to 0.
    pub fn conditional_shannon(p: &JointDistribution) -> Result<Self> {
        p.require_normalized()?;
        let marg: Vec<f64> = (0..1u32 << p.k())
            .map(|m| shannon_weights(p.marginal(m).values().copied()))
            .collect();
        let full = SubsetMask::full(p.k());
        Self::from_fn(p.k(), |j| (marg[full.0 as usize] - marg[j.complement(p.k()).0 as usize]).max(0.0))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, mask: SubsetMask) -> f64 {
        self.values[mask.0 as usize]
    }

    pub fn set(&mut self, mask: SubsetMask, value: f64) {
        self.values[mask.0 as usize] = value;
    }

    /// Profile of the relabeled parties: `h'_{σ(J)} = h_J`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for m in 0..self.values.len() as u32 {
            values[SubsetMask(m).permuted(perm).0 as usize] = self.values[m as usize];
        }
        Self { k: self.k, values }
    }
}

/// `−Σ p log₂ p` over positive weights.
pub fn shannon_weights(weights: impl IntoIterator<Item = f64>) -> f64 {
    weights
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Binary entropy `h(p)`.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_weights([p, 1.0 - p])
}

pub fn shannon(p: &JointDistribution) -> Result<f64> {
    p.require_normalized()?;
    Ok(shannon_weights(p.probs().values().copied()))
}

/// `H(A_S)_P` for the marginal on the sites in `S`.
pub fn marginal_entropy(p: &JointDistribution, s: SubsetMask) -> Result<f64> {
    p.require_normalized()?;
    Ok(shannon_weights(p.marginal(s.0).values().copied()))
}

/// `H(A_J | A_J̄)_P = H(A_{[k]}) − H(A_J̄)`.
pub fn conditional_shannon(p: &JointDistribution, j: SubsetMask) -> Result<f64> {
    p.require_normalized()?;
    let rest = j.complement(p.k());
    let h = shannon_weights(p.probs().values().copied());
    let h_rest = shannon_weights(p.marginal(rest.0).values().copied());
    Ok((h - h_rest).max(0.0))
}

/// `log₂` of the largest fiber of `Φ → A_J̄`.
pub fn max_entropy_conditional(phi: &SupportSet, j: SubsetMask) -> f64 {
    let rest: Vec<usize> = j.complement(phi.k()).sites().collect();
    let mut fibers: BTreeMap<IndexTuple, usize> = BTreeMap::new();
    for e in phi.elements() {
        *fibers.entry(rest.iter().map(|&s| e[s]).collect()).or_insert(0) += 1;
    }
    (*fibers.values().max().expect("support is nonempty") as f64).log2()
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || alpha == 1.0 || alpha.is_nan() {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "α > 0, α ≠ 1",
        });
    }
    Ok(())
}

/// `H_α(Q) = log₂(Σ Q^α)/(1−α)`; `α = ∞` gives the min-entropy.
pub fn renyi(q: &JointDistribution, alpha: f64) -> Result<f64> {
    q.require_normalized()?;
    check_order(alpha)?;
    Ok(renyi_weights(q.probs().values().copied(), alpha))
}

pub(crate) fn renyi_weights(weights: impl IntoIterator<Item = f64>, alpha: f64) -> f64 {
    let w: Vec<f64> = weights.into_iter().filter(|&p| p > 0.0).collect();
    let max = w.iter().cloned().fold(0.0, f64::max);
    if alpha.is_infinite() {
        return -max.log2();
    }
    // Σ p^α = max^α Σ (p/max)^α
    let s: f64 = w.iter().map(|&p| (p / max).powf(alpha)).sum();
    (alpha * max.log2() + s.log2()) / (1.0 - alpha)
}

/// `−log₂ max Q`.
pub fn min_entropy(q: &JointDistribution) -> Result<f64> {
    renyi(q, f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{asymmetric_w, ghz, w};

    fn dist(dims: Vec<usize>, items: &[(&[usize], f64)]) -> JointDistribution {
        JointDistribution::new(dims, items.iter().map(|(i, p)| (i.to_vec(), *p))).unwrap()
    }

    #[test]
    fn shannon_examples() {
        let two = dist(vec![2, 2], &[(&[0, 0], 0.5), (&[1, 1], 0.5)]);
        assert!((shannon(&two).unwrap() - 1.0).abs() < 1e-15);
        let w3 = w(3).unwrap().distribution();
        assert!((shannon(&w3).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!((shannon(&w3).unwrap() - 1.584963).abs() < 1e-6);
        let point = dist(vec![2, 2], &[(&[1, 0], 1.0)]);
        assert_eq!(shannon(&point).unwrap(), 0.0);
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(JointDistribution::new(vec![2, 2], [(vec![0, 0], 1.5), (vec![1, 1], -0.5)]).is_err());
    }

    #[test]
    fn subnormalized_rejected_where_normalization_needed() {
        let p = JointDistribution::subnormalized(vec![2, 2], [(vec![0, 0], 0.5)]).unwrap();
        assert!(shannon(&p).is_err());
    }

    #[test]
    fn conditional_shannon_w3() {
        let p = w(3).unwrap().distribution();
        assert!(conditional_shannon(&p, SubsetMask::from_sites(&[0])).unwrap().abs() < 1e-12);
        let h12 = conditional_shannon(&p, SubsetMask::from_sites(&[0, 1])).unwrap();
        assert!((h12 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_shannon_of_product_is_sum_of_marginals() {
        let a = [0.2, 0.8];
        let b = [0.1, 0.3, 0.6];
        let c = [0.5, 0.5];
        let mut items = Vec::new();
        for (i, pa) in a.iter().enumerate() {
            for (j, pb) in b.iter().enumerate() {
                for (l, pc) in c.iter().enumerate() {
                    items.push((vec![i, j, l], pa * pb * pc));
                }
            }
        }
        let p = JointDistribution::new(vec![2, 3, 2], items).unwrap();
        let hs = [shannon_weights(a), shannon_weights(b), shannon_weights(c)];
        for m in SubsetMask::proper(3) {
            let want: f64 = m.sites().map(|j| hs[j]).sum();
            assert!((conditional_shannon(&p, m).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn max_entropy_conditional_examples() {
        let phi = w(3).unwrap().support();
        assert_eq!(max_entropy_conditional(&phi, SubsetMask::from_sites(&[0])), 0.0);
        assert_eq!(max_entropy_conditional(&phi, SubsetMask::from_sites(&[0, 1])), 1.0);
        let full = SupportSet::new(
            vec![2, 3],
            (0..2).flat_map(|a| (0..3).map(move |b| vec![a, b])),
        )
        .unwrap();
        assert!((max_entropy_conditional(&full, SubsetMask(0b10)) - 3f64.log2()).abs() < 1e-15);
        assert!((max_entropy_conditional(&full, SubsetMask(0b11)) - 6f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn renyi_examples() {
        let u = ghz(5, 3).unwrap().distribution();
        for alpha in [0.5, 2.0, 7.0, f64::INFINITY] {
            assert!((renyi(&u, alpha).unwrap() - 5f64.log2()).abs() < 1e-12);
        }
        let q = dist(vec![3, 3], &[(&[0, 0], 0.5), (&[1, 1], 0.25), (&[2, 2], 0.25)]);
        assert!((renyi(&q, 2.0).unwrap() - (-(0.375f64).log2())).abs() < 1e-12);
        assert!((renyi(&q, 2.0).unwrap() - 1.415037).abs() < 1e-6);
        let w3 = w(3).unwrap().distribution();
        assert!((min_entropy(&w3).unwrap() - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn renyi_rejects_bad_order() {
        let u = ghz(2, 3).unwrap().distribution();
        assert!(renyi(&u, 1.0).is_err());
        assert!(renyi(&u, 0.0).is_err());
        assert!(renyi(&u, -2.0).is_err());
    }

    #[test]
    fn profile_permutation() {
        let p = asymmetric_w(0.2).unwrap().distribution();
        let perm = [1, 2, 0];
        let mut inverse = [0; 3];
        for (j, &t) in perm.iter().enumerate() {
            inverse[t] = j;
        }
        // site j of the permuted distribution is site inverse[j] of p
        let q = p.permute_parties(&inverse).unwrap();
        let hp = EntropyProfile::conditional_shannon(&p).unwrap().permuted(&perm);
        let hq = EntropyProfile::conditional_shannon(&q).unwrap();
        for m in 0..8 {
            assert!((hp.get(SubsetMask(m)) - hq.get(SubsetMask(m))).abs() < 1e-12);
        }
    }

    #[test]
    fn mask_helpers() {
        let m = SubsetMask::from_sites(&[0, 2]);
        assert_eq!(m.to_string(), "{1,3}");
        assert_eq!(m.complement(3), SubsetMask(0b010));
        assert!(m.is_proper(3));
        assert!(!SubsetMask::full(3).is_proper(3));
        assert_eq!(SubsetMask::proper(3).count(), 6);
    }
}
