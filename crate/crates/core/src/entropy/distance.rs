//! Majorization and the classical purified distance.

const MAJ_TOL: f64 = 1e-12;

/// Missing mass at or below this is summation rounding in a normalized input.
const DEFICIT_TOL: f64 = 1e-12;

fn deficit(v: &[f64]) -> f64 {
    let d = 1.0 - v.iter().sum::<f64>();
    if d > DEFICIT_TOL {
        d
    } else {
        0.0
    }
}

fn sorted_desc(p: &[f64], len: usize) -> Vec<f64> {
    let mut v = p.to_vec();
    v.resize(len, 0.0);
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `p ≻ q`: every partial sum of the decreasingly sorted `p` dominates the
/// corresponding partial sum of `q`, and the totals agree. Shorter inputs
/// are zero-padded.
pub fn majorizes(p: &[f64], q: &[f64]) -> bool {
    let n = p.len().max(q.len());
    let (ps, qs) = (sorted_desc(p, n), sorted_desc(q, n));
    let (mut sp, mut sq) = (0.0, 0.0);
    for i in 0..n {
        sp += ps[i];
        sq += qs[i];
        if sp < sq - MAJ_TOL {
            return false;
        }
    }
    (sp - sq).abs() <= MAJ_TOL
}

/// `p ≺ q`.
pub fn is_majorized_by(p: &[f64], q: &[f64]) -> bool {
    majorizes(q, p)
}

/// Whether `Σ √p_i |ii⟩` can be turned into `Σ √q_i |ii⟩` by LOCC: `p ≺ q`.
pub fn nielsen_convertible(p: &[f64], q: &[f64]) -> bool {
    is_majorized_by(p, q)
}

/// Generalized fidelity of diagonal subnormalized states,
/// `√((1−Σp)(1−Σq)) + Σ √(p_i q_i)`.
pub fn fidelity(p: &[f64], q: &[f64]) -> f64 {
    let overlap: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    (deficit(p) * deficit(q)).sqrt() + overlap
}

/// `√(1 − F²)`, with `F` from [`fidelity`]; inputs are aligned by index and
/// zero-padded.
///
/// Appending the deficit `1 − Σp` turns `√p` into a unit vector, so
/// `1 − F = ½ Σ (√p_i − √q_i)²` over the padded vectors. That form keeps full
/// relative precision when the inputs are close.
pub fn purified_distance(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0).max(0.0);
    let gap: f64 = (0..n)
        .map(|i| at(p, i).sqrt() - at(q, i).sqrt())
        .chain(std::iter::once(deficit(p).sqrt() - deficit(q).sqrt()))
        .map(|d| d * d)
        .sum::<f64>()
        / 2.0;
    let gap = gap.min(1.0);
    (gap * (2.0 - gap)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majorization_basics() {
        assert!(majorizes(&[1.0, 0.0], &[0.5, 0.5]));
        assert!(!majorizes(&[0.5, 0.5], &[1.0, 0.0]));
        assert!(is_majorized_by(&[0.5, 0.5], &[1.0]));
        assert!(majorizes(&[0.6, 0.4], &[0.4, 0.6]));
        // incomparable pair
        assert!(!majorizes(&[0.5, 0.25, 0.25], &[0.4, 0.4, 0.2]));
        assert!(!majorizes(&[0.4, 0.4, 0.2], &[0.5, 0.25, 0.25]));
    }

    #[test]
    fn nielsen_direction() {
        // a maximally entangled pair converts to anything with the same Schmidt rank
        assert!(nielsen_convertible(&[0.5, 0.5], &[0.9, 0.1]));
        assert!(!nielsen_convertible(&[0.9, 0.1], &[0.5, 0.5]));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(purified_distance(&[0.2, 0.8], &[0.2, 0.8]), 0.0);
        assert!((purified_distance(&[1.0, 0.0], &[0.5, 0.5]) - 0.5f64.sqrt()).abs() < 1e-12);
        // a missing atom of weight 1/2 against the full distribution
        let d = purified_distance(&[0.5], &[0.5, 0.5]);
        assert!((d - 0.75f64.sqrt()).abs() < 1e-12);
        assert!((purified_distance(&[1.0], &[0.0, 1.0]) - 1.0).abs() < 1e-12);
    }
}
