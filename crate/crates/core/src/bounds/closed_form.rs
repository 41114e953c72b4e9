//! Closed-form minima equal to the LP bound for `k = 3`, `k = 4` and for
//! permutation-symmetric distributions.

use crate::entropy::{marginal_entropy, SubsetMask};
use crate::error::{Error, Result};
use crate::states::{next_permutation, JointDistribution};

fn require_k(p: &JointDistribution, k: usize) -> Result<()> {
    if p.k() != k {
        return Err(Error::UnsupportedK {
            k: p.k(),
            reason: "closed form is for a different number of parties",
        });
    }
    Ok(())
}

/// Marginal entropies `H(A_S)` for every mask.
fn marginal_table(p: &JointDistribution) -> Result<Vec<f64>> {
    (0..1u32 << p.k())
        .map(|m| marginal_entropy(p, SubsetMask(m)))
        .collect()
}

/// `min{I(1:23), I(2:13), I(3:12), ½ I(1:2:3)}`.
pub fn closed_form_k3(p: &JointDistribution) -> Result<f64> {
    require_k(p, 3)?;
    let h = marginal_table(p)?;
    let total = h[7];
    let mut best = 0.5 * (h[1] + h[2] + h[4] - total);
    for j in 0..3 {
        let single = 1usize << j;
        best = best.min(h[single] + h[7 ^ single] - total);
    }
    Ok(best)
}

/// The minimum over party relabelings of
/// `I(a:bcd)`, `I(ab:cd)`, `½ I(ab:c:d)`, `⅓ I(a:b:c:d)` and
/// `⅓(H(ab) + H(ac) + H(bc)) + ⅔ H(d) − ⅔ H(abcd)`.
pub fn closed_form_k4(p: &JointDistribution) -> Result<f64> {
    require_k(p, 4)?;
    let h = marginal_table(p)?;
    let total = h[15];
    let mut best = (h[1] + h[2] + h[4] + h[8] - total) / 3.0;
    let mut perm = vec![0usize, 1, 2, 3];
    loop {
        let s = |sites: &[usize]| h[sites.iter().fold(0usize, |m, &i| m | 1 << perm[i])];
        let candidates = [
            s(&[0]) + s(&[1, 2, 3]) - total,
            s(&[0, 1]) + s(&[2, 3]) - total,
            0.5 * (s(&[0, 1]) + s(&[2]) + s(&[3]) - total),
            (s(&[0, 1]) + s(&[0, 2]) + s(&[1, 2])) / 3.0 + 2.0 / 3.0 * s(&[3]) - 2.0 / 3.0 * total,
        ];
        best = candidates.into_iter().fold(best, f64::min);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best)
}

/// `min_{1≤j≤k−1} (k H(A_{[k−j]}) − (k−j) H(P)) / j` for a distribution
/// invariant under permuting the parties.
pub fn symmetric_closed_form(p: &JointDistribution) -> Result<f64> {
    let k = p.k();
    if k < 2 {
        return Err(Error::UnsupportedK {
            k,
            reason: "need at least two parties",
        });
    }
    if p.dims().iter().any(|&d| d != p.dims()[0]) {
        return Err(Error::Precondition("symmetric form needs equal site dimensions".into()));
    }
    // adjacent transpositions generate the symmetric group
    for t in 0..k - 1 {
        let mut order: Vec<usize> = (0..k).collect();
        order.swap(t, t + 1);
        let q = p.permute_parties(&order)?;
        let asym = p
            .probs()
            .iter()
            .map(|(idx, &v)| (v - q.prob(idx)).abs())
            .chain(q.probs().iter().map(|(idx, &v)| (v - p.prob(idx)).abs()))
            .fold(0.0, f64::max);
        if asym > 1e-12 {
            return Err(Error::Precondition(format!(
                "distribution is not symmetric under swapping parties {} and {}",
                t + 1,
                t + 2
            )));
        }
    }
    let total = marginal_entropy(p, SubsetMask::full(k))?;
    let mut best = f64::INFINITY;
    for j in 1..k {
        let hk = marginal_entropy(p, SubsetMask::full(k - j))?;
        best = best.min((k as f64 * hk - (k - j) as f64 * total) / j as f64);
    }
    Ok(best)
}
