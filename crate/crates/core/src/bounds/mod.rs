//! Headline rate bounds: the asymptotic LP bound, the one-shot count and its
//! simplified form, the subrank rate bound, and closed forms for small `k`.

mod closed_form;
mod oneshot;

pub use closed_form::{closed_form_k3, closed_form_k4, symmetric_closed_form};
pub use oneshot::{corollary_n, delta, log2_sum_exp2_pair, oneshot_n, OneShotParams, OneShotWitness};

use crate::entropy::{maximize_conditional_entropy, shannon, EntropyProfile, SubsetMask};
use crate::error::{Error, Result};
use crate::lp::{solve_primal, CoveringLP, LpSolution};
use crate::states::{JointDistribution, SupportSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// `H(P) − min Σ x_j` from the covering LP.
    AsymptoticLp,
    /// Floor of the one-shot expression at a given `α`.
    OneShot,
    /// The simplified one-shot bound with `α = 1 + Δ/h`.
    OneShotSimplified,
    /// `h_{[k]} − Σ(x_j + η)` with maximum-entropy `h_J`.
    SubrankRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    /// The raw value was negative and has been replaced by 0.
    ClampedAtZero,
    /// A GHZ count came out negative; returned unchanged.
    NegativeCount,
    /// Reported at the LP optimum, where the constraints hold with equality
    /// rather than strictly (`η = 0`).
    NonStrictLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Lp { entropy: f64, solution: LpSolution },
    OneShot(OneShotWitness),
    Subrank { h_full: f64, eta: f64, solution: LpSolution },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    pub witness: Witness,
    pub provenance: Provenance,
    pub flags: Vec<Flag>,
}

impl BoundReport {
    /// Recomputes the value from the witness alone.
    pub fn reevaluate(&self) -> f64 {
        match (&self.witness, self.provenance) {
            (Witness::Lp { entropy, solution }, _) => (entropy - solution.x.iter().sum::<f64>()).max(0.0),
            (Witness::OneShot(w), Provenance::OneShotSimplified) => w.simplified(),
            (Witness::OneShot(w), _) => w.count(),
            (Witness::Subrank { h_full, eta, solution }, _) => {
                h_full - solution.x.iter().map(|x| x + eta).sum::<f64>()
            }
        }
    }
}

/// `max(0, H(P) − min Σ x_j)` subject to `Σ_{j∈J} x_j ≥ H(A_J|A_J̄)_P`.
pub fn theorem1_bound(p: &JointDistribution) -> Result<BoundReport> {
    let entropy = shannon(p)?;
    let solution = solve_primal(&CoveringLP::from_distribution(p)?)?;
    let raw = entropy - solution.objective;
    let mut flags = Vec::new();
    if raw < 0.0 {
        flags.push(Flag::ClampedAtZero);
    }
    Ok(BoundReport {
        value: raw.max(0.0),
        witness: Witness::Lp { entropy, solution },
        provenance: Provenance::AsymptoticLp,
        flags,
    })
}

/// Lower bound on the log asymptotic subrank of `Ψ`:
/// `h_{[k]} − Σ_j (x_j + η)` where `h_J` is the largest `H(A_J|A_J̄)_Q` over
/// `Q` on `Ψ` sharing the single-site marginals of `P`, and `x` solves the
/// covering LP on the proper `h_J`.
pub fn subrank_rate_bound(psi: &SupportSet, p: &JointDistribution, eta: f64) -> Result<BoundReport> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            range: "η ≥ 0",
        });
    }
    if p.dims() != psi.dims() {
        return Err(Error::Validation("distribution and support have different site dimensions".into()));
    }
    p.require_normalized()?;
    let k = psi.k();
    let marginals: Vec<Vec<f64>> = (0..k).map(|j| p.site_marginal(j)).collect();
    let mut h = vec![0.0; 1 << k];
    for mask in 1..1u32 << k {
        h[mask as usize] = maximize_conditional_entropy(psi, &marginals, SubsetMask(mask))?.value;
    }
    let profile = EntropyProfile::from_fn(k, |m| h[m.0 as usize])?;
    let solution = solve_primal(&CoveringLP::new(profile))?;
    let h_full = h[SubsetMask::full(k).0 as usize];
    let value = h_full - solution.x.iter().map(|x| x + eta).sum::<f64>();
    Ok(BoundReport {
        value,
        witness: Witness::Subrank { h_full, eta, solution },
        provenance: Provenance::SubrankRate,
        flags: if eta == 0.0 { vec![Flag::NonStrictLimit] } else { vec![] },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, ghz_p, rohrlich, w};

    #[test]
    fn w3_bound() {
        let r = theorem1_bound(&w(3).unwrap().distribution()).unwrap();
        assert!((r.value - 1.5f64.log2()).abs() < 1e-9);
        assert!((r.value - 0.584963).abs() < 1e-6);
        assert!((r.reevaluate() - r.value).abs() < 1e-12);
        assert!(r.flags.is_empty());
    }

    #[test]
    fn ghz_p_bound_is_entropy() {
        let probs = [0.5, 0.3, 0.2];
        let p = ghz_p(&probs, 3).unwrap().distribution();
        let want = crate::entropy::shannon_weights(probs);
        assert!((theorem1_bound(&p).unwrap().value - want).abs() < 1e-9);
    }

    #[test]
    fn rohrlich_computational_basis_is_zero() {
        for i in 0..=10 {
            let p = rohrlich(i as f64 / 10.0).unwrap().distribution();
            assert!(theorem1_bound(&p).unwrap().value.abs() < 1e-9);
        }
    }

    #[test]
    fn subrank_w3_and_ghz() {
        let psi = w(3).unwrap();
        let r = subrank_rate_bound(&psi.support(), &psi.distribution(), 0.0).unwrap();
        assert!((r.value - 1.5f64.log2()).abs() < 1e-6);
        assert_eq!(r.flags, vec![Flag::NonStrictLimit]);
        let shrunk = subrank_rate_bound(&psi.support(), &psi.distribution(), 0.01).unwrap();
        assert!((r.value - shrunk.value - 0.03).abs() < 1e-6);

        for levels in 2..=4 {
            let g = ghz(levels, 3).unwrap();
            let r = subrank_rate_bound(&g.support(), &g.distribution(), 0.0).unwrap();
            assert!((r.value - (levels as f64).log2()).abs() < 1e-6);
        }
    }

    #[test]
    fn subrank_two_party_mutual_information() {
        // the bound is I(A1:A2) at the maximum-entropy coupling
        let psi = SupportSet::new(vec![2, 2], [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let p = JointDistribution::new(vec![2, 2], [(vec![0, 0], 0.4), (vec![0, 1], 0.2), (vec![1, 1], 0.4)]).unwrap();
        let r = subrank_rate_bound(&psi, &p, 0.0).unwrap();
        // marginals (0.6, 0.4) and (0.4, 0.6) pin Q on this support
        let hq = crate::entropy::shannon_weights([0.4, 0.2, 0.4]);
        let want = 2.0 * crate::entropy::binary_entropy(0.4) - hq;
        assert!((r.value - want).abs() < 1e-6);
    }
}
