//! Restriction of `ψ^{⊗n}` to the jointly typical set.
//!
//! An `n`-tuple of support elements is typical when, for every subset `J` of
//! parties (including `∅` and `[k]`), its empirical log-likelihood under the
//! marginal `P_{A_J}` is within `δ + (1/n)·log(1−ε)` of `H(A_J)`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{IndexTuple, PureState, TENSOR_POWER_LIMIT};
use crate::error::{Error, Result};

/// Default mass budget `ε` in the typicality window.
pub const DEFAULT_TYPICAL_EPS: f64 = 0.1;

/// Slack on the window comparison; exact-type tuples sit on the boundary.
const WINDOW_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Truncation {
    /// Renormalized restriction `φ`.
    pub state: PureState,
    /// `P^{⊗n}(T^n)`.
    pub retained_mass: f64,
    /// Number of typical `n`-tuples.
    pub typical_count: usize,
    /// `δ + log₂(1−ε)/n`.
    pub window: f64,
}

pub fn truncate_to_typical(state: &PureState, n: usize, delta: f64, eps: f64) -> Result<Truncation> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: "n ≥ 1",
        });
    }
    if !(delta > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "δ > 0",
        });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "(0, 1)",
        });
    }
    let size = (state.amps().len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > TENSOR_POWER_LIMIT {
        return Err(Error::TooLarge {
            what: "n-fold support enumeration",
            size,
            limit: TENSOR_POWER_LIMIT,
        });
    }

    let k = state.k();
    let window = delta + (1.0 - eps).log2() / n as f64;
    let empty = |retained_mass| Error::EmptyTypicalSet {
        n,
        delta,
        eps,
        window,
        retained_mass,
    };
    if window < 0.0 {
        return Err(empty(0.0));
    }

    let dist = state.distribution();
    let base: Vec<(&IndexTuple, Complex64)> = state.amps().iter().map(|(i, &a)| (i, a)).collect();
    let masks = 1usize << k;

    // log₂ P_{A_J}(s_J) per support element and mask, and H(A_J) per mask.
    let mut loglik = vec![vec![0.0; masks]; base.len()];
    let mut entropy = vec![0.0; masks];
    for mask in 0..masks {
        let marg = dist.marginal(mask as u32);
        entropy[mask] = -marg.values().map(|&p| p * p.log2()).sum::<f64>();
        for (s, (idx, _)) in base.iter().enumerate() {
            let key: IndexTuple = (0..k).filter(|j| mask >> j & 1 == 1).map(|j| idx[j]).collect();
            loglik[s][mask] = marg[&key].log2();
        }
    }

    let mut amps: BTreeMap<IndexTuple, Complex64> = BTreeMap::new();
    let mut retained = 0.0;
    let mut digits = vec![0usize; n];
    let nf = n as f64;
    loop {
        let typical = (0..masks).all(|mask| {
            let sum: f64 = digits.iter().map(|&s| loglik[s][mask]).sum();
            (entropy[mask] + sum / nf).abs() <= window + WINDOW_SLACK
        });
        if typical {
            let mut idx = vec![0usize; k];
            let mut amp = Complex64::new(1.0, 0.0);
            for &s in &digits {
                let (t, a) = base[s];
                for (j, slot) in idx.iter_mut().enumerate() {
                    *slot = *slot * state.dims()[j] + t[j];
                }
                amp *= a;
            }
            retained += amp.norm_sqr();
            amps.insert(idx, amp);
        }
        if !super::odometer(&mut digits, base.len()) {
            break;
        }
    }

    if amps.is_empty() {
        return Err(empty(0.0));
    }
    let typical_count = amps.len();
    let dims = state.dims().iter().map(|&d| d.pow(n as u32)).collect();
    let state = PureState::normalized(dims, amps)?;
    Ok(Truncation {
        state,
        retained_mass: retained,
        typical_count,
        window,
    })
}
