//! The randomized partition protocol: local random partitions, per-outcome
//! collision graphs, the resulting random GHZ ensemble, and the end-to-end
//! pipeline from `n` copies of a state to a GHZ count.

mod ensemble;
mod meanbounds;
mod partition;

use std::fmt;

pub use ensemble::{
    achievable_value, build_ensemble, extract_ghz_count, GhzCount, GhzEnsemble, ReferenceDistribution,
};
pub use meanbounds::{
    exact_expectation, meanbounds_sandwich, monte_carlo_expectation, HomogeneousModel, MonteCarloEstimate,
    SubsetGenerator, ENUMERATION_LIMIT,
};
pub use partition::{
    collision_graph, isolated_vertices, sample_partitions, CollisionGraph, FreeDiagonal, OutcomeKey,
    PartitionFamily,
};

use crate::bounds::{delta as collision_margin, theorem1_bound};
use crate::entropy::min_entropy;
use crate::error::{Error, Result};
use crate::lp::{solve_primal, CoveringLP};
use crate::states::{truncate_to_typical, PureState, DEFAULT_TYPICAL_EPS};

/// Order used when the simplified-bound choice `α = 1 + Δ/h` is unavailable.
pub const FALLBACK_ALPHA: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub n: usize,
    pub delta: f64,
    /// Smoothing error of the final GHZ count.
    pub eps: f64,
    pub seed: u64,
    /// Thread count; 0 picks the rayon default.
    pub workers: usize,
    /// Mass budget of the typicality window.
    pub typical_eps: f64,
    /// Fixed Rényi order; `None` derives it from `Δ` and `H_min`.
    pub alpha: Option<f64>,
}

impl ProtocolConfig {
    pub fn new(n: usize, delta: f64, eps: f64, seed: u64) -> Self {
        Self {
            n,
            delta,
            eps,
            seed,
            workers: 0,
            typical_eps: DEFAULT_TYPICAL_EPS,
            alpha: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub n: usize,
    pub delta: f64,
    pub eps: f64,
    pub seed: u64,
    pub alpha: f64,
    pub x: Vec<f64>,
    pub m: Vec<u64>,
    pub success_mass: f64,
    pub n_exact: i64,
    pub n_smooth: i64,
    pub rate_per_copy: f64,
    /// `H(X|Y)/n` of the ensemble.
    pub conditional_entropy_rate: f64,
    pub theorem1: f64,
    pub typical_mass: f64,
    pub typical_count: usize,
    pub outcomes: usize,
    pub verified_outcomes: usize,
}

fn list<T>(v: &[T], show: impl Fn(&T) -> String) -> String {
    let items: Vec<String> = v.iter().map(show).collect();
    format!("[{}]", items.join(", "))
}

/// One `key=value` line per field; reals to six decimals.
impl fmt::Display for ProtocolReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "delta={:.6}", self.delta)?;
        writeln!(f, "eps={:.6}", self.eps)?;
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "alpha={:.6}", self.alpha)?;
        writeln!(f, "x={}", list(&self.x, |v| format!("{v:.6}")))?;
        writeln!(f, "M={}", list(&self.m, |v| v.to_string()))?;
        writeln!(f, "success_mass={:.6}", self.success_mass)?;
        writeln!(f, "N_exact={}", self.n_exact)?;
        writeln!(f, "N_smooth={}", self.n_smooth)?;
        writeln!(f, "rate_per_copy={:.6}", self.rate_per_copy)?;
        writeln!(f, "conditional_entropy_rate={:.6}", self.conditional_entropy_rate)?;
        writeln!(f, "theorem1={:.6}", self.theorem1)?;
        writeln!(f, "typical_mass={:.6}", self.typical_mass)?;
        writeln!(f, "typical_count={}", self.typical_count)?;
        writeln!(f, "outcomes={}", self.outcomes)?;
        writeln!(f, "free_diagonal_checks={}", self.verified_outcomes)?;
        writeln!(f, "phase_adjustment=no-op")
    }
}

/// Largest exponent for which `⌈2^e⌉` is representable as a partition count.
const MAX_LOG_M: f64 = 62.0;

/// Runs the whole pipeline on `n` copies of `psi`.
///
/// The state is cut down to its jointly typical part, the covering LP of
/// the single-copy profile gives `x`, and site `j` is partitioned into
/// `M_j = ⌈2^{n(x_j+2δ)+k}⌉` random cells.
pub fn run_protocol(psi: &PureState, config: &ProtocolConfig) -> Result<ProtocolReport> {
    if !(config.eps > 0.0 && config.eps < 1.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: config.eps,
            range: "0 < ε < 1",
        });
    }
    let n = config.n;
    let k = psi.k();
    let dist = psi.distribution();
    let theorem1 = theorem1_bound(&dist)?.value;
    let x = solve_primal(&CoveringLP::from_distribution(&dist)?)?.x;

    let truncation = truncate_to_typical(psi, n, config.delta, config.typical_eps)?;
    let phi = &truncation.state;

    let mut m = Vec::with_capacity(k);
    for &xj in &x {
        let e = n as f64 * (xj + 2.0 * config.delta) + k as f64;
        if e > MAX_LOG_M {
            return Err(Error::TooLarge {
                what: "partition count exponent",
                size: e.ceil() as u128,
                limit: MAX_LOG_M as u128,
            });
        }
        m.push(e.exp2().ceil() as u64);
    }

    let alpha = match config.alpha {
        Some(a) => a,
        None => {
            let log_m: Vec<f64> = m.iter().map(|&v| (v as f64).log2()).collect();
            let d = collision_margin(&phi.support(), &log_m)?;
            let h = min_entropy(&phi.distribution())? - log_m.iter().sum::<f64>();
            if d > 0.0 && h > 0.0 {
                1.0 + d / h
            } else {
                FALLBACK_ALPHA
            }
        }
    };

    let pf = sample_partitions(phi.dims(), &m, config.seed)?;
    let ens = build_ensemble(phi, &pf, config.workers)?;
    let count = extract_ghz_count(&ens, alpha, config.eps)?;
    // An outcome that leaves a failure atom of positive mass cannot be turned
    // into GHZ states exactly.
    let n_exact = if ens.failure_mass() > 0.0 { 0 } else { count.exact };

    Ok(ProtocolReport {
        n,
        delta: config.delta,
        eps: config.eps,
        seed: config.seed,
        alpha,
        x,
        m,
        success_mass: ens.success_mass(),
        n_exact,
        n_smooth: count.smooth,
        rate_per_copy: count.smooth as f64 / n as f64,
        conditional_entropy_rate: ens.conditional_entropy() / n as f64,
        theorem1,
        typical_mass: truncation.retained_mass,
        typical_count: truncation.typical_count,
        outcomes: ens.cells().len(),
        verified_outcomes: ens.verified_outcomes(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, w};

    #[test]
    fn ghz_survives() {
        let psi = ghz(2, 3).unwrap();
        let r = run_protocol(&psi, &ProtocolConfig::new(8, 0.05, 0.5, 3)).unwrap();
        assert_eq!(r.success_mass, 1.0);
        assert_eq!(r.x, vec![0.0; 3]);
        // 2^{0.8+3} rounds up to 14 cells per site
        assert_eq!(r.m, vec![14; 3]);
        assert_eq!(r.typical_count, 256);
        assert!(r.n_exact >= 0 && r.conditional_entropy_rate <= 1.0);
    }

    #[test]
    fn report_is_worker_independent() {
        let psi = w(3).unwrap();
        let mut c = ProtocolConfig::new(9, 0.05, 0.2, 42);
        c.workers = 1;
        let a = run_protocol(&psi, &c).unwrap().to_string();
        c.workers = 4;
        let b = run_protocol(&psi, &c).unwrap().to_string();
        assert_eq!(a, b);
        assert!(a.contains("phase_adjustment=no-op"));
    }
}
