use crate::entropy::{max_entropy_conditional, min_entropy, renyi, SubsetMask};
use crate::error::{Error, Result};
use crate::states::{JointDistribution, SupportSet};

use super::{BoundReport, Flag, Provenance, Witness};

/// Partition counts `M_j`, Rényi order `α` and smoothing `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneShotParams {
    pub m: Vec<u64>,
    pub alpha: f64,
    pub eps: f64,
}

impl OneShotParams {
    pub fn new(m: Vec<u64>, alpha: f64, eps: f64) -> Result<Self> {
        if m.contains(&0) {
            return Err(Error::Validation("partition counts must be ≥ 1".into()));
        }
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "1 < α < ∞",
            });
        }
        check_eps(eps)?;
        Ok(Self { m, alpha, eps })
    }

    pub fn log_m(&self) -> Vec<f64> {
        self.m.iter().map(|&v| (v as f64).log2()).collect()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "0 < ε < 1",
        });
    }
    Ok(())
}

/// Scalars from which a one-shot count is computed.
#[derive(Debug, Clone, PartialEq)]
pub struct OneShotWitness {
    pub delta: f64,
    /// `H_α(Q)`, or `H_min(Q)` for the simplified bound.
    pub entropy: f64,
    /// `Σ log₂ M_j`.
    pub log_m_sum: f64,
    /// `Σ log₂ |I_j|`.
    pub log_dims_sum: f64,
    pub alpha: f64,
    pub eps: f64,
    /// Optimal weight of the failure flag in the reference distribution.
    pub r: f64,
}

/// `log₂(2^a + 2^b)`.
pub fn log2_sum_exp2_pair(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

impl OneShotWitness {
    /// The bracketed expression before flooring.
    pub fn raw(&self) -> f64 {
        let a = self.alpha;
        let penalty = (1.0 + 1.0 / (a - 1.0)) * (10.0 / (self.eps * self.eps)).log2();
        let lse = log2_sum_exp2_pair((1.0 - a) / a * (self.entropy - self.log_m_sum), -self.delta / a);
        a / (1.0 - a) * lse - penalty
    }

    pub fn count(&self) -> f64 {
        self.raw().floor()
    }

    /// `h(1 − 1/Δ) − (2 + Σ log|I_j| / Δ) log₂(10/ε²)` with `h = H_min − Σ log M`.
    pub fn simplified(&self) -> f64 {
        let h = self.entropy - self.log_m_sum;
        h * (1.0 - 1.0 / self.delta)
            - (2.0 + self.log_dims_sum / self.delta) * (10.0 / (self.eps * self.eps)).log2()
    }
}

/// `Δ = −k + min_J (Σ_{j∈J} log₂ M_j − H_max(A_J|A_J̄)_Φ)` over proper `J`.
pub fn delta(phi: &SupportSet, log_m: &[f64]) -> Result<f64> {
    let k = phi.k();
    if log_m.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: log_m.len(),
        });
    }
    let min = SubsetMask::proper(k)
        .map(|j| j.sites().map(|s| log_m[s]).sum::<f64>() - max_entropy_conditional(phi, j))
        .fold(f64::INFINITY, f64::min);
    Ok(min - k as f64)
}

fn optimal_r(w: &OneShotWitness) -> f64 {
    let a = w.alpha;
    // r = 2^{−Δ/α} / (2^{(1−α)(H−S)/α} + 2^{−Δ/α})
    let e = (1.0 - a) / a * (w.entropy - w.log_m_sum) + w.delta / a;
    1.0 / (1.0 + e.exp2())
}

fn witness(q: &JointDistribution, log_m: &[f64], entropy: f64, alpha: f64, eps: f64) -> Result<OneShotWitness> {
    let phi = q.support()?;
    let mut w = OneShotWitness {
        delta: delta(&phi, log_m)?,
        entropy,
        log_m_sum: log_m.iter().sum(),
        log_dims_sum: q.dims().iter().map(|&d| (d as f64).log2()).sum(),
        alpha,
        eps,
        r: 0.0,
    };
    w.r = optimal_r(&w);
    Ok(w)
}

/// The one-shot GHZ count at the given `M`, `α`, `ε`. May be negative.
pub fn oneshot_n(q: &JointDistribution, params: &OneShotParams) -> Result<BoundReport> {
    q.require_normalized()?;
    if params.m.len() != q.k() {
        return Err(Error::DimensionMismatch {
            expected: q.k(),
            got: params.m.len(),
        });
    }
    let w = witness(q, &params.log_m(), renyi(q, params.alpha)?, params.alpha, params.eps)?;
    let value = w.count();
    Ok(BoundReport {
        value,
        flags: if value < 0.0 { vec![Flag::NegativeCount] } else { vec![] },
        witness: Witness::OneShot(w),
        provenance: Provenance::OneShot,
    })
}

/// The simplified one-shot bound, valid when `Δ > 0` and
/// `H_min(Q) > Σ log₂ M_j`; uses `α = 1 + Δ/h` internally.
pub fn corollary_n(q: &JointDistribution, m: &[u64], eps: f64) -> Result<BoundReport> {
    q.require_normalized()?;
    check_eps(eps)?;
    if m.len() != q.k() {
        return Err(Error::DimensionMismatch {
            expected: q.k(),
            got: m.len(),
        });
    }
    if m.contains(&0) {
        return Err(Error::Validation("partition counts must be ≥ 1".into()));
    }
    let log_m: Vec<f64> = m.iter().map(|&v| (v as f64).log2()).collect();
    let mut w = witness(q, &log_m, min_entropy(q)?, f64::NAN, eps)?;
    if !(w.delta > 0.0) {
        return Err(Error::Precondition(format!("Δ > 0 fails: Δ = {}", w.delta)));
    }
    let h = w.entropy - w.log_m_sum;
    if !(h > 0.0) {
        return Err(Error::Precondition(format!(
            "H_min(Q) > Σ log₂ M_j fails: H_min = {}, Σ log₂ M_j = {}",
            w.entropy, w.log_m_sum
        )));
    }
    w.alpha = 1.0 + w.delta / h;
    w.r = optimal_r(&w);
    let value = w.simplified();
    Ok(BoundReport {
        value,
        flags: if value < 0.0 { vec![Flag::NegativeCount] } else { vec![] },
        witness: Witness::OneShot(w),
        provenance: Provenance::OneShotSimplified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, w};

    #[test]
    fn unit_partitions_give_minus_k() {
        let phi = ghz(3, 4).unwrap().support();
        assert_eq!(delta(&phi, &[0.0; 4]).unwrap(), -4.0);
    }

    #[test]
    fn ghz_sizes() {
        // GHZ support has H_max = 0 for every proper J, so Δ = −k + min_J Σ_J log M
        let phi = ghz(2, 3).unwrap().support();
        let d = delta(&phi, &[3.0, 4.0, 5.0]).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn count_increases_with_eps() {
        let q = w(3).unwrap().tensor_power(4).unwrap().distribution();
        let mut last = f64::NEG_INFINITY;
        for eps in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let r = oneshot_n(&q, &OneShotParams::new(vec![8, 8, 8], 1.5, eps).unwrap()).unwrap();
            assert!(r.value >= last);
            last = r.value;
        }
    }

    #[test]
    fn simplified_large_delta_limit() {
        let wtn = OneShotWitness {
            delta: 1e12,
            entropy: 30.0,
            log_m_sum: 10.0,
            log_dims_sum: 40.0,
            alpha: 2.0,
            eps: 0.5,
            r: 0.0,
        };
        assert!((wtn.simplified() - (20.0 - 2.0 * 40f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn simplified_preconditions() {
        let q = w(3).unwrap().distribution();
        assert!(matches!(corollary_n(&q, &[1, 1, 1], 0.1), Err(Error::Precondition(m)) if m.contains("Δ")));
        // large M makes Δ positive but swamps H_min
        assert!(matches!(corollary_n(&q, &[64, 64, 64], 0.1), Err(Error::Precondition(m)) if m.contains("H_min")));
    }

    #[test]
    fn optimal_r_maximizes() {
        let q = w(3).unwrap().tensor_power(3).unwrap().distribution();
        let r = oneshot_n(&q, &OneShotParams::new(vec![4, 4, 4], 2.0, 0.1).unwrap()).unwrap();
        let Witness::OneShot(wt) = r.witness else { unreachable!() };
        let a = wt.alpha;
        let f = |r: f64| {
            (((1.0 - r).powf(1.0 - a) * ((1.0 - a) * (wt.entropy - wt.log_m_sum)).exp2()
                + r.powf(1.0 - a) * (-wt.delta).exp2())
            .log2())
                / (1.0 - a)
        };
        let best = f(wt.r);
        for d in [-0.01, 0.01] {
            assert!(f((wt.r + d).clamp(1e-9, 1.0 - 1e-9)) <= best + 1e-12);
        }
    }
}
