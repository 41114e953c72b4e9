//! The random GHZ ensemble produced by one round of local partition
//! measurements, and the GHZ counts extractable from it.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::entropy::{
    alt_smoothing_penalty, conditional_shannon_pair, renyi_down, renyi_up, ConditionalPair,
};
use crate::error::{Error, Result};
use crate::states::{IndexTuple, PureState, NORM_TOL};

use super::partition::{isolated_flags, FreeDiagonal, OutcomeKey, PartitionFamily};

/// `P_XY` with `Y` an outcome tuple or the failure flag. For each realized
/// outcome `m`, the atoms are `(x, m)` for `x ∈ Γ_m`, weighted `|φ_x|²`;
/// the leftover mass sits on the single atom `(0, *)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzEnsemble {
    cells: BTreeMap<Vec<u64>, Vec<(IndexTuple, f64)>>,
    failure: f64,
    /// `Σ_j log₂ M_j`.
    log_cells: f64,
    checked: usize,
}

impl GhzEnsemble {
    /// Assembles an ensemble from explicit per-outcome diagonals.
    pub fn from_cells(
        cells: BTreeMap<Vec<u64>, Vec<(IndexTuple, f64)>>,
        failure: f64,
        log_cells: f64,
    ) -> Result<Self> {
        let success: f64 = cells.values().flatten().map(|(_, p)| p).sum();
        if cells.values().flatten().any(|(_, p)| !(*p > 0.0)) || !(failure >= 0.0) {
            return Err(Error::Validation("ensemble weights must be positive".into()));
        }
        if (success + failure - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "ensemble total is {}, expected 1",
                success + failure
            )));
        }
        Ok(Self {
            cells,
            failure,
            log_cells,
            checked: 0,
        })
    }

    pub fn cells(&self) -> &BTreeMap<Vec<u64>, Vec<(IndexTuple, f64)>> {
        &self.cells
    }

    pub fn failure_mass(&self) -> f64 {
        self.failure
    }

    pub fn success_mass(&self) -> f64 {
        1.0 - self.failure
    }

    pub fn log_cells(&self) -> f64 {
        self.log_cells
    }

    /// Number of outcomes whose diagonal passed both free-diagonal checks
    /// during construction.
    pub fn verified_outcomes(&self) -> usize {
        self.checked
    }

    pub fn diagonal(&self, outcome: &[u64]) -> FreeDiagonal {
        FreeDiagonal::new(
            self.cells
                .get(outcome)
                .into_iter()
                .flatten()
                .map(|(x, _)| x.clone()),
        )
    }

    /// The weight table keyed by `(x, y)`; `x = None` stands for the failure
    /// atom's `0`.
    pub fn weight_table(&self) -> BTreeMap<(Option<IndexTuple>, OutcomeKey), f64> {
        let mut t: BTreeMap<_, _> = self
            .cells
            .iter()
            .flat_map(|(m, xs)| {
                xs.iter()
                    .map(move |(x, p)| ((Some(x.clone()), OutcomeKey::Cell(m.clone())), *p))
            })
            .collect();
        if self.failure > 0.0 {
            t.insert((None, OutcomeKey::Failure), self.failure);
        }
        t
    }

    /// Relabels `X` and `Y` by position so that the entropy functions apply.
    pub fn to_pair(&self) -> ConditionalPair {
        let mut w: Vec<((usize, usize), f64)> = self
            .cells
            .values()
            .enumerate()
            .flat_map(|(y, xs)| xs.iter().enumerate().map(move |(x, (_, p))| ((x, y), *p)))
            .collect();
        if self.failure > 0.0 || w.is_empty() {
            w.push(((0, self.cells.len()), self.failure.max(0.0)));
        }
        ConditionalPair::new(w).expect("ensemble weights are valid")
    }

    /// `H(X|Y)` in bits.
    pub fn conditional_entropy(&self) -> f64 {
        conditional_shannon_pair(&self.to_pair())
    }
}

/// Outcome label, its kept tuples with weights, and the weight it lost.
type OutcomeResult = (Vec<u64>, Vec<(IndexTuple, f64)>, f64);

/// Measures `φ` with the partitions `pf`: groups the support by outcome,
/// keeps each group's isolated vertices, and merges everything else into the
/// failure atom. Work is spread over `workers` threads (0 means the rayon
/// default); the result does not depend on the worker count.
pub fn build_ensemble(phi: &PureState, pf: &PartitionFamily, workers: usize) -> Result<GhzEnsemble> {
    if phi.dims() != pf.dims() {
        return Err(Error::Validation("partition family and state have different site dimensions".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let support: Vec<(&IndexTuple, f64)> = phi.amps().iter().map(|(i, a)| (i, a.norm_sqr())).collect();

    let (cells, checked, failure) = pool.install(|| -> Result<_> {
        let outcomes: Vec<Vec<u64>> = support.par_iter().map(|(idx, _)| pf.outcome(idx)).collect();
        let mut groups: HashMap<&[u64], Vec<usize>> = HashMap::new();
        for (pos, m) in outcomes.iter().enumerate() {
            groups.entry(m.as_slice()).or_default().push(pos);
        }
        let mut groups: Vec<(&[u64], Vec<usize>)> = groups.into_iter().collect();
        groups.sort_unstable_by(|a, b| a.0.cmp(b.0));

        let per_outcome: Vec<Result<OutcomeResult>> = groups
            .par_iter()
            .map(|(m, members)| {
                let tuples: Vec<&[usize]> = members.iter().map(|&p| support[p].0.as_slice()).collect();
                let flags = isolated_flags(&tuples);
                let kept: Vec<(IndexTuple, f64)> = members
                    .iter()
                    .zip(&flags)
                    .filter(|(_, &f)| f)
                    .map(|(&p, _)| (support[p].0.clone(), support[p].1))
                    .collect();
                let gamma = FreeDiagonal::new(kept.iter().map(|(x, _)| x.clone()));
                gamma.verify(members.iter().map(|&p| support[p].0))?;
                let lost: f64 = members
                    .iter()
                    .zip(&flags)
                    .filter(|(_, &f)| !f)
                    .map(|(&p, _)| support[p].1)
                    .sum();
                Ok((m.to_vec(), kept, lost))
            })
            .collect();
        let mut cells = BTreeMap::new();
        let mut checked = 0;
        let mut failure = 0.0;
        for r in per_outcome {
            let (m, kept, lost) = r?;
            checked += 1;
            failure += lost;
            if !kept.is_empty() {
                cells.insert(m, kept);
            }
        }
        Ok((cells, checked, failure))
    })?;

    Ok(GhzEnsemble {
        cells,
        failure,
        log_cells: pf.counts().iter().map(|&m| (m as f64).log2()).sum(),
        checked,
    })
}

/// A reference distribution on outcomes.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceDistribution {
    /// `R(m) = (1 − r)/Π M_j` on every outcome tuple and `R(*) = r`.
    Uniform { r: f64 },
    Explicit(BTreeMap<OutcomeKey, f64>),
}

/// `(1/(1−α)) log₂ [Σ_m Σ_{x∈Γ_m} P(x)^α R(m)^{1−α} + P(*)^α R(*)^{1−α}]`.
pub fn achievable_value(ens: &GhzEnsemble, alpha: f64, reference: &ReferenceDistribution) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "1 < α < ∞",
        });
    }
    let log_r = |key: &OutcomeKey| -> Result<f64> {
        let v = match (reference, key) {
            (ReferenceDistribution::Uniform { r }, OutcomeKey::Cell(_)) => (1.0 - r).log2() - ens.log_cells,
            (ReferenceDistribution::Uniform { r }, OutcomeKey::Failure) => r.log2(),
            (ReferenceDistribution::Explicit(map), k) => map.get(k).copied().unwrap_or(0.0).log2(),
        };
        if v == f64::NEG_INFINITY {
            return Err(Error::ReferenceSupport(format!("reference vanishes at {key:?}")));
        }
        Ok(v)
    };
    if let ReferenceDistribution::Uniform { r } = reference {
        if !(0.0..=1.0).contains(r) {
            return Err(Error::OutOfRange {
                name: "r",
                value: *r,
                range: "[0, 1]",
            });
        }
    }
    let mut terms = Vec::new();
    for (m, xs) in &ens.cells {
        let lr = log_r(&OutcomeKey::Cell(m.clone()))?;
        for (_, p) in xs {
            terms.push(alpha * p.log2() + (1.0 - alpha) * lr);
        }
    }
    if ens.failure > 0.0 {
        terms.push(alpha * ens.failure.log2() + (1.0 - alpha) * log_r(&OutcomeKey::Failure)?);
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + terms.iter().map(|t| (t - max).exp2()).sum::<f64>().log2();
    Ok(lse / (1.0 - alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzCount {
    /// `⌊H↑_α(X|Y) − (1 + 1/(α−1)) log₂(10/ε²)⌋`: GHZ pairs up to error `ε`.
    pub smooth: i64,
    /// `⌊H↓_∞(X|Y)⌋`: GHZ pairs obtained exactly.
    pub exact: i64,
    pub renyi_up: f64,
    pub penalty: f64,
}

pub fn extract_ghz_count(ens: &GhzEnsemble, alpha: f64, eps: f64) -> Result<GhzCount> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "0 < ε < 1",
        });
    }
    let pair = ens.to_pair();
    let up = renyi_up(&pair, alpha)?;
    let penalty = alt_smoothing_penalty(alpha, eps)?;
    Ok(GhzCount {
        smooth: (up - penalty).floor() as i64,
        exact: renyi_down(&pair, f64::INFINITY)?.floor() as i64,
        renyi_up: up,
        penalty,
    })
}
