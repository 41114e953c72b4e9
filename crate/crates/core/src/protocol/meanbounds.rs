//! Expected weight of the isolated-vertex diagonal under random subset
//! choices: the two-sided estimate from pair-inclusion probabilities, an
//! exact enumerator, and a Monte Carlo estimator.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::entropy::{max_entropy_conditional, SubsetMask};
use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::states::SupportSet;

use super::partition::isolated_flags;

/// Cap on configurations visited by [`exact_expectation`].
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Pair-inclusion probabilities `p_J`, indexed by the mask of coordinates
/// on which the two tuples differ (`p_∅` is the single-tuple probability).
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousModel {
    k: usize,
    p: Vec<f64>,
}

impl HomogeneousModel {
    pub fn new(k: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != 1 << k {
            return Err(Error::DimensionMismatch {
                expected: 1 << k,
                got: p.len(),
            });
        }
        if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Validation("p_J must lie in [0, 1]".into()));
        }
        if p.iter().any(|&v| v > p[0] + 1e-15) {
            return Err(Error::Validation("p_∅ must dominate every p_J".into()));
        }
        Ok(Self { k, p })
    }

    /// Each index of site `j` is kept independently with probability `q_j`:
    /// `p_J = Π q_j · Π_{j∈J} q_j`.
    pub fn independent(q: &[f64]) -> Result<Self> {
        let k = q.len();
        let base: f64 = q.iter().product();
        Self::new(
            k,
            (0..1u32 << k)
                .map(|m| base * SubsetMask(m).sites().map(|j| q[j]).product::<f64>())
                .collect(),
        )
    }

    /// A fixed cell of independent uniform `M_j`-labelings:
    /// `p_J = (Π M_j)⁻¹ Π_{j∈J} M_j⁻¹`.
    pub fn partition(m: &[u64]) -> Result<Self> {
        let q: Vec<f64> = m.iter().map(|&v| 1.0 / v as f64).collect();
        Self::independent(&q)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self, mask: SubsetMask) -> f64 {
        self.p[mask.0 as usize]
    }
}

/// `(lower, upper)` with `upper = p_∅ Σf` and
/// `lower = (p_∅ − Σ_J 2^{H_max(A_J|A_J̄)_Φ} p_J) Σf` over proper `J`.
pub fn meanbounds_sandwich(
    phi: &SupportSet,
    f: &dyn Fn(&[usize]) -> f64,
    model: &HomogeneousModel,
) -> Result<(f64, f64)> {
    if model.k() != phi.k() {
        return Err(Error::DimensionMismatch {
            expected: phi.k(),
            got: model.k(),
        });
    }
    let total = weight_sum(phi, f)?;
    let collisions: f64 = SubsetMask::proper(phi.k())
        .map(|j| max_entropy_conditional(phi, j).exp2() * model.p(j))
        .sum();
    let p0 = model.p(SubsetMask(0));
    Ok(((p0 - collisions) * total, p0 * total))
}

fn weight_sum(phi: &SupportSet, f: &dyn Fn(&[usize]) -> f64) -> Result<f64> {
    let mut s = 0.0;
    for e in phi.elements() {
        let v = f(e);
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::Validation(format!("f({e:?}) = {v} is not a finite nonnegative weight")));
        }
        s += v;
    }
    Ok(s)
}

/// How the random subsets `W_j` are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum SubsetGenerator {
    /// Fixed subsets.
    Deterministic(Vec<Vec<usize>>),
    /// Every index of site `j` kept independently with probability `q_j`.
    IndependentInclusion(Vec<f64>),
    /// Uniform `M_j`-labelings; the statistic is averaged over all
    /// `Π M_j` cells, which by symmetry equals its value on any one cell.
    PartitionCell(Vec<u64>),
}

impl SubsetGenerator {
    /// The homogeneous model this generator realizes, if any.
    pub fn model(&self) -> Option<Result<HomogeneousModel>> {
        match self {
            Self::Deterministic(_) => None,
            Self::IndependentInclusion(q) => Some(HomogeneousModel::independent(q)),
            Self::PartitionCell(m) => Some(HomogeneousModel::partition(m)),
        }
    }

    fn validate(&self, k: usize) -> Result<()> {
        let len = match self {
            Self::Deterministic(w) => w.len(),
            Self::IndependentInclusion(q) => {
                if q.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return Err(Error::Validation("inclusion probabilities must lie in [0, 1]".into()));
                }
                q.len()
            }
            Self::PartitionCell(m) => {
                if m.contains(&0) {
                    return Err(Error::Validation("partition counts must be ≥ 1".into()));
                }
                m.len()
            }
        };
        if len != k {
            return Err(Error::DimensionMismatch { expected: k, got: len });
        }
        Ok(())
    }
}

/// The support re-indexed by the positions of its coordinates within each
/// site's projection; only those indices influence the statistic.
struct Compact {
    tuples: Vec<Vec<usize>>,
    weights: Vec<f64>,
    site_sizes: Vec<usize>,
    originals: Vec<Vec<usize>>,
}

impl Compact {
    fn new(phi: &SupportSet, f: &dyn Fn(&[usize]) -> f64) -> Result<Self> {
        weight_sum(phi, f)?;
        let k = phi.k();
        let originals: Vec<Vec<usize>> = (0..k)
            .map(|j| phi.elements().iter().map(|e| e[j]).collect::<BTreeSet<_>>().into_iter().collect())
            .collect();
        let pos: Vec<BTreeMap<usize, usize>> = originals
            .iter()
            .map(|o| o.iter().enumerate().map(|(p, &i)| (i, p)).collect())
            .collect();
        Ok(Self {
            tuples: phi
                .elements()
                .iter()
                .map(|e| e.iter().enumerate().map(|(j, i)| pos[j][i]).collect())
                .collect(),
            weights: phi.elements().iter().map(|e| f(e)).collect(),
            site_sizes: originals.iter().map(|o| o.len()).collect(),
            originals,
        })
    }

    /// `Σ_{i∈Γ} f(i)` summed over all groups of equal labels, where label
    /// `u64::MAX` marks an excluded index.
    fn value(&self, labels: &[Vec<u64>]) -> f64 {
        let mut groups: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
        'tuples: for (t, e) in self.tuples.iter().enumerate() {
            let mut key = Vec::with_capacity(e.len());
            for (j, &p) in e.iter().enumerate() {
                let l = labels[j][p];
                if l == u64::MAX {
                    continue 'tuples;
                }
                key.push(l);
            }
            groups.entry(key).or_default().push(t);
        }
        groups
            .values()
            .map(|members| {
                let refs: Vec<&[usize]> = members.iter().map(|&t| self.tuples[t].as_slice()).collect();
                members
                    .iter()
                    .zip(isolated_flags(&refs))
                    .filter(|(_, f)| *f)
                    .map(|(&t, _)| self.weights[t])
                    .sum::<f64>()
            })
            .sum()
    }
}

fn configurations(radix: &[u64], site_sizes: &[usize]) -> Result<u128> {
    let mut total: u128 = 1;
    for (&r, &n) in radix.iter().zip(site_sizes) {
        for _ in 0..n {
            total = total.saturating_mul(r as u128);
        }
    }
    if total > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            what: "subset configurations",
            size: total,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(total)
}

/// `E[Σ_{i∈Γ} f(i)]` by enumerating every configuration of the generator.
pub fn exact_expectation(
    phi: &SupportSet,
    f: &dyn Fn(&[usize]) -> f64,
    generator: &SubsetGenerator,
) -> Result<f64> {
    generator.validate(phi.k())?;
    let c = Compact::new(phi, f)?;
    match generator {
        SubsetGenerator::Deterministic(w) => Ok(c.value(&deterministic_labels(&c, w))),
        SubsetGenerator::IndependentInclusion(q) => {
            configurations(&vec![2; q.len()], &c.site_sizes)?;
            let mut labels: Vec<Vec<u64>> = c.site_sizes.iter().map(|&n| vec![0; n]).collect();
            let mut acc = 0.0;
            loop {
                let mut prob = 1.0;
                for (j, row) in labels.iter().enumerate() {
                    for &l in row {
                        prob *= if l == 0 { q[j] } else { 1.0 - q[j] };
                    }
                }
                if prob > 0.0 {
                    acc += prob * c.value(&labels);
                }
                if !advance(&mut labels, |_| 2, |d| if d == 1 { u64::MAX } else { 0 }) {
                    break;
                }
            }
            Ok(acc)
        }
        SubsetGenerator::PartitionCell(m) => {
            let count = configurations(m, &c.site_sizes)?;
            let mut labels: Vec<Vec<u64>> = c.site_sizes.iter().map(|&n| vec![0; n]).collect();
            let mut acc = 0.0;
            loop {
                acc += c.value(&labels);
                if !advance(&mut labels, |j| m[j], |d| d) {
                    break;
                }
            }
            let cells: f64 = m.iter().map(|&v| v as f64).product();
            Ok(acc / count as f64 / cells)
        }
    }
}

/// Odometer over per-site label vectors. `radix(j)` is the digit count for
/// site `j`; `decode` maps a digit to the stored label.
fn advance(labels: &mut [Vec<u64>], radix: impl Fn(usize) -> u64, decode: impl Fn(u64) -> u64) -> bool {
    let encode = |l: u64| (0..).find(|&d| decode(d) == l).expect("label in range");
    for j in (0..labels.len()).rev() {
        for p in (0..labels[j].len()).rev() {
            let d = encode(labels[j][p]) + 1;
            if d < radix(j) {
                labels[j][p] = decode(d);
                return true;
            }
            labels[j][p] = decode(0);
        }
    }
    false
}

fn deterministic_labels(c: &Compact, w: &[Vec<usize>]) -> Vec<Vec<u64>> {
    c.originals
        .iter()
        .zip(w)
        .map(|(orig, keep)| {
            orig.iter()
                .map(|i| if keep.contains(i) { 0 } else { u64::MAX })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub samples: usize,
}

/// Sample mean of `Σ_{i∈Γ} f(i)` (cell-averaged for partitions). Sample `s`
/// draws from its own counter stream, so the estimate is independent of
/// `workers`.
pub fn monte_carlo_expectation(
    phi: &SupportSet,
    f: &dyn Fn(&[usize]) -> f64,
    generator: &SubsetGenerator,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate> {
    generator.validate(phi.k())?;
    if samples < 2 {
        return Err(Error::Validation("need at least two samples".into()));
    }
    let c = Compact::new(phi, f)?;
    let draw = |s: usize| -> f64 {
        let mut rng = CounterRng::stream(seed, &[s as u64]);
        match generator {
            SubsetGenerator::Deterministic(w) => c.value(&deterministic_labels(&c, w)),
            SubsetGenerator::IndependentInclusion(q) => {
                let labels: Vec<Vec<u64>> = c
                    .site_sizes
                    .iter()
                    .enumerate()
                    .map(|(j, &n)| (0..n).map(|_| if rng.bernoulli(q[j]) { 0 } else { u64::MAX }).collect())
                    .collect();
                c.value(&labels)
            }
            SubsetGenerator::PartitionCell(m) => {
                let labels: Vec<Vec<u64>> = c
                    .site_sizes
                    .iter()
                    .enumerate()
                    .map(|(j, &n)| (0..n).map(|_| rng.below(m[j])).collect())
                    .collect();
                let cells: f64 = m.iter().map(|&v| v as f64).product();
                c.value(&labels) / cells
            }
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let values: Vec<f64> = pool.install(|| (0..samples).into_par_iter().map(draw).collect());
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MonteCarloEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, w};

    fn one(_: &[usize]) -> f64 {
        1.0
    }

    #[test]
    fn no_collisions_collapses_sandwich() {
        let mut p = vec![0.0; 8];
        p[0] = 0.3;
        let model = HomogeneousModel::new(3, p).unwrap();
        let phi = w(3).unwrap().support();
        let (lo, hi) = meanbounds_sandwich(&phi, &one, &model).unwrap();
        assert!((lo - 0.9).abs() < 1e-15 && (hi - 0.9).abs() < 1e-15);
    }

    #[test]
    fn w3_independent_half() {
        let phi = w(3).unwrap().support();
        let q = [0.5, 0.5, 0.5];
        let model = HomogeneousModel::independent(&q).unwrap();
        let (lo, hi) = meanbounds_sandwich(&phi, &one, &model).unwrap();
        // singletons: H_max = 0, p = 1/16; pairs: H_max = 1, p = 1/32
        assert!((hi - 3.0 / 8.0).abs() < 1e-15);
        assert!((lo - 3.0 * (1.0 / 8.0 - 3.0 / 16.0 - 3.0 * 2.0 / 32.0)).abs() < 1e-15);
        let exact = exact_expectation(&phi, &one, &SubsetGenerator::IndependentInclusion(q.to_vec())).unwrap();
        // (1,0,0) needs its three indices kept (1/8) and neither (0,1,0) nor
        // (0,0,1) in V: either A drops 0 (1/2) or A keeps 0 and B, C drop 1
        // (1/8). That is 5/64 per tuple.
        assert!((exact - 15.0 / 64.0).abs() < 1e-15, "{exact}");
        assert!(lo <= exact && exact <= hi);
    }

    #[test]
    fn w3_partition_exact_in_sandwich() {
        let phi = w(3).unwrap().support();
        let m = vec![2, 2, 2];
        let gen = SubsetGenerator::PartitionCell(m.clone());
        let exact = exact_expectation(&phi, &one, &gen).unwrap();
        let (lo, hi) = meanbounds_sandwich(&phi, &one, &HomogeneousModel::partition(&m).unwrap()).unwrap();
        assert!(lo <= exact + 1e-15 && exact <= hi + 1e-15, "{lo} {exact} {hi}");
    }

    #[test]
    fn deterministic_generator() {
        let phi = ghz(3, 3).unwrap().support();
        let gen = SubsetGenerator::Deterministic(vec![vec![0, 1], vec![0, 1, 2], vec![1, 2]]);
        let v = exact_expectation(&phi, &|e: &[usize]| (e[0] + 1) as f64, &gen).unwrap();
        assert_eq!(v, 2.0);
        let mc = monte_carlo_expectation(&phi, &one, &gen, 10, 0, 1).unwrap();
        assert_eq!(mc.stderr, 0.0);
    }

    #[test]
    fn monte_carlo_agrees() {
        let phi = w(3).unwrap().support();
        let gen = SubsetGenerator::PartitionCell(vec![2, 3, 2]);
        let exact = exact_expectation(&phi, &one, &gen).unwrap();
        let mc = monte_carlo_expectation(&phi, &one, &gen, 20_000, 1, 0).unwrap();
        assert!((mc.mean - exact).abs() < 5.0 * mc.stderr + 1e-12);
        let again = monte_carlo_expectation(&phi, &one, &gen, 20_000, 1, 3).unwrap();
        assert_eq!(mc, again);
    }

    #[test]
    fn enumeration_guard() {
        let phi = ghz(30, 3).unwrap().support();
        let gen = SubsetGenerator::PartitionCell(vec![4, 4, 4]);
        assert!(matches!(exact_expectation(&phi, &one, &gen), Err(Error::TooLarge { .. })));
    }
}
