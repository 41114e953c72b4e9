//! Named state families used throughout the comparisons.

use num_complex::Complex64;

use super::PureState;
use crate::error::{Error, Result};

pub const FAMILY_NAMES: &[&str] = &["ghz", "w", "asymmetric-w", "rohrlich", "permutations"];

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            range: "k ≥ 2",
        });
    }
    Ok(())
}

/// Generalized GHZ state `Σ_x √P(x) |x…x⟩` on `k` sites of dimension `|P|`.
pub fn ghz_p(probs: &[f64], k: usize) -> Result<PureState> {
    check_k(k)?;
    if probs.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::Validation("negative GHZ weight".into()));
    }
    let d = probs.len();
    PureState::new(
        vec![d; k],
        probs.iter().enumerate().map(|(x, &p)| (vec![x; k], real(p.sqrt()))),
    )
}

/// `r`-level GHZ state with uniform weights.
pub fn ghz(levels: usize, k: usize) -> Result<PureState> {
    if levels == 0 {
        return Err(Error::OutOfRange {
            name: "levels",
            value: 0.0,
            range: "levels ≥ 1",
        });
    }
    ghz_p(&vec![1.0 / levels as f64; levels], k)
}

/// `W_k = (|10…0⟩ + |01…0⟩ + ⋯ + |0…01⟩)/√k`.
pub fn w(k: usize) -> Result<PureState> {
    check_k(k)?;
    let a = real((1.0 / k as f64).sqrt());
    PureState::new(
        vec![2; k],
        (0..k).map(|j| {
            let mut idx = vec![0; k];
            idx[j] = 1;
            (idx, a)
        }),
    )
}

/// `√p|100⟩ + √p|010⟩ + √(1−2p)|001⟩` for `p ∈ [0, 1/2]`.
pub fn asymmetric_w(p: f64) -> Result<PureState> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1/2]",
        });
    }
    let rest = (1.0 - 2.0 * p).max(0.0);
    PureState::new(
        vec![2, 2, 2],
        [
            (vec![1, 0, 0], real(p.sqrt())),
            (vec![0, 1, 0], real(p.sqrt())),
            (vec![0, 0, 1], real(rest.sqrt())),
        ],
    )
}

/// `√(p/2)|000⟩ + √(p/2)|011⟩ + √((1−p)/2)|100⟩ − √((1−p)/2)|111⟩`.
pub fn rohrlich(p: f64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    let a = (p / 2.0).sqrt();
    let b = ((1.0 - p) / 2.0).sqrt();
    PureState::new(
        vec![2, 2, 2],
        [
            (vec![0, 0, 0], real(a)),
            (vec![0, 1, 1], real(a)),
            (vec![1, 0, 0], real(b)),
            (vec![1, 1, 1], real(-b)),
        ],
    )
}

/// Equal superposition of `|σ(1)…σ(k)⟩` over all permutations, 0-based labels.
pub fn permutation_superposition(k: usize) -> Result<PureState> {
    check_k(k)?;
    if k > 9 {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            range: "2 ≤ k ≤ 9",
        });
    }
    let mut perms = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        perms.push(cur.clone());
        if !next_permutation(&mut cur) {
            break;
        }
    }
    let a = real((1.0 / perms.len() as f64).sqrt());
    PureState::new(vec![k; k], perms.into_iter().map(|p| (p, a)))
}

pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Looks up a family by name. `param` is `k` for `w` and `permutations`, the
/// level count for `ghz` (tripartite), and `p` for the two interpolating
/// families.
pub fn family(name: &str, param: f64) -> Result<PureState> {
    let as_int = |name: &'static str| -> Result<usize> {
        if param.fract() != 0.0 || param < 0.0 {
            return Err(Error::OutOfRange {
                name,
                value: param,
                range: "a nonnegative integer",
            });
        }
        Ok(param as usize)
    };
    match name {
        "ghz" => ghz(as_int("levels")?, 3),
        "w" => w(as_int("k")?),
        "asymmetric-w" | "asymmetric_w" => asymmetric_w(param),
        "rohrlich" => rohrlich(param),
        "permutations" | "permutation_superposition" => permutation_superposition(as_int("k")?),
        other => Err(Error::Validation(format!(
            "unknown family `{other}` (expected one of {})",
            FAMILY_NAMES.join(", ")
        ))),
    }
}
