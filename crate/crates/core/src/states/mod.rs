//! Multipartite pure states in a fixed product basis.
//!
//! States are sparse: only nonzero amplitudes are stored, keyed by the tuple
//! of per-site basis indices. Everything downstream (induced distributions,
//! supports, the randomized protocol) only ever touches the support, so a
//! dense `Π|I_j|` array is never materialized.

mod families;
mod file;
mod typical;

pub use families::{
    asymmetric_w, family, ghz, ghz_p, permutation_superposition, rohrlich, w, FAMILY_NAMES,
};
pub(crate) use families::next_permutation;
pub use file::{parse_state, render_state};
pub use typical::{truncate_to_typical, Truncation, DEFAULT_TYPICAL_EPS};

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-site basis indices `(i_1, …, i_k)`.
pub type IndexTuple = Vec<usize>;

/// Tolerance on `Σ|amp|² = 1` and on distribution totals.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance on `U U† = I`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Amplitudes at or below this modulus are treated as exact zeros after a
/// basis rotation (cancellation leaves ~1e-17 residue).
pub const AMP_CUTOFF: f64 = 1e-14;

fn check_tuple(dims: &[usize], idx: &[usize]) -> Result<()> {
    if idx.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            got: idx.len(),
        });
    }
    if let Some((j, (&i, &d))) = idx.iter().zip(dims).enumerate().find(|(_, (&i, &d))| i >= d) {
        return Err(Error::Validation(format!(
            "index {i} at site {j} is outside dimension {d}"
        )));
    }
    Ok(())
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::Validation(format!(
            "need at least two parties, got {}",
            dims.len()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::Validation("site dimension 0".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: BTreeMap<IndexTuple, Complex64>,
}

impl PureState {
    /// Builds a state and checks that it is a unit vector.
    pub fn new(
        dims: Vec<usize>,
        amps: impl IntoIterator<Item = (IndexTuple, Complex64)>,
    ) -> Result<Self> {
        let state = Self::collect(dims, amps)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "state is not normalized: Σ|amp|² = {norm:.15}"
            )));
        }
        Ok(state)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(
        dims: Vec<usize>,
        amps: impl IntoIterator<Item = (IndexTuple, Complex64)>,
    ) -> Result<Self> {
        let mut state = Self::collect(dims, amps)?;
        let norm = state.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::EmptySupport);
        }
        for a in state.amps.values_mut() {
            *a /= norm;
        }
        Ok(state)
    }

    fn collect(
        dims: Vec<usize>,
        amps: impl IntoIterator<Item = (IndexTuple, Complex64)>,
    ) -> Result<Self> {
        check_dims(&dims)?;
        let mut map = BTreeMap::new();
        for (idx, a) in amps {
            check_tuple(&dims, &idx)?;
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::Validation("non-finite amplitude".into()));
            }
            *map.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        map.retain(|_, a: &mut Complex64| a.norm() > 0.0);
        if map.is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(Self { dims, amps: map })
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &BTreeMap<IndexTuple, Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, idx: &[usize]) -> Complex64 {
        self.amps.get(idx).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// `P(i) = |ψ_i|²`.
    pub fn distribution(&self) -> JointDistribution {
        JointDistribution {
            dims: self.dims.clone(),
            probs: self
                .amps
                .iter()
                .map(|(i, a)| (i.clone(), a.norm_sqr()))
                .collect(),
            normalized: true,
        }
    }

    pub fn support(&self) -> SupportSet {
        SupportSet {
            dims: self.dims.clone(),
            elements: self.amps.keys().cloned().collect(),
        }
    }

    /// Applies `u` to its tensor factor.
    pub fn apply_local_unitary(&self, u: &LocalUnitary) -> Result<Self> {
        if u.site >= self.k() {
            return Err(Error::Validation(format!(
                "site {} out of range for k = {}",
                u.site,
                self.k()
            )));
        }
        let d = self.dims[u.site];
        if u.dim != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: u.dim,
            });
        }
        let mut out: BTreeMap<IndexTuple, Complex64> = BTreeMap::new();
        for (idx, &amp) in &self.amps {
            let col = idx[u.site];
            for row in 0..d {
                let coeff = u.entry(row, col);
                if coeff.norm() == 0.0 {
                    continue;
                }
                let mut target = idx.clone();
                target[u.site] = row;
                *out.entry(target).or_default() += coeff * amp;
            }
        }
        out.retain(|_, a| a.norm() > AMP_CUTOFF);
        Self::normalized(self.dims.clone(), out)
    }

    /// Reorders parties: site `j` of the result is site `order[j]` of `self`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<Self> {
        let k = self.k();
        let mut seen = vec![false; k];
        if order.len() != k || order.iter().any(|&j| j >= k || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::Validation("party order is not a permutation".into()));
        }
        let dims = order.iter().map(|&j| self.dims[j]).collect();
        let amps = self
            .amps
            .iter()
            .map(|(idx, &a)| (order.iter().map(|&j| idx[j]).collect(), a));
        Self::new(dims, amps)
    }

    /// `ψ^{⊗n}` regrouped as a `k`-party state with site dimensions `d_j^n`.
    /// Copy 0 is the most significant digit of each site index.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("tensor power n must be ≥ 1".into()));
        }
        let size = (self.amps.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > TENSOR_POWER_LIMIT {
            return Err(Error::TooLarge {
                what: "tensor-power support",
                size,
                limit: TENSOR_POWER_LIMIT,
            });
        }
        let mut dims = Vec::with_capacity(self.k());
        for &d in &self.dims {
            let p = (d as u128).checked_pow(n as u32).filter(|&p| p <= usize::MAX as u128);
            dims.push(p.ok_or(Error::TooLarge {
                what: "tensor-power site dimension",
                size: u128::MAX,
                limit: usize::MAX as u128,
            })? as usize);
        }
        let base: Vec<_> = self.amps.iter().collect();
        let mut amps = Vec::with_capacity(size as usize);
        let mut digits = vec![0usize; n];
        loop {
            let mut idx = vec![0usize; self.k()];
            let mut amp = Complex64::new(1.0, 0.0);
            for &s in &digits {
                let (t, a) = base[s];
                for (j, slot) in idx.iter_mut().enumerate() {
                    *slot = *slot * self.dims[j] + t[j];
                }
                amp *= a;
            }
            amps.push((idx, amp));
            if !odometer(&mut digits, base.len()) {
                break;
            }
        }
        Self::new(dims, amps)
    }
}

/// Guard on `|supp ψ|^n` for explicit tensor powers.
pub const TENSOR_POWER_LIMIT: u128 = 10_000_000;

/// Advances a base-`radix` counter (last digit fastest). Returns false on wrap.
pub(crate) fn odometer(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// A nonnegative weight map over index tuples; totals up to 1 are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    dims: Vec<usize>,
    probs: BTreeMap<IndexTuple, f64>,
    normalized: bool,
}

impl JointDistribution {
    /// Normalized distribution (total must be 1 within [`NORM_TOL`]).
    pub fn new(dims: Vec<usize>, probs: impl IntoIterator<Item = (IndexTuple, f64)>) -> Result<Self> {
        let d = Self::collect(dims, probs, true)?;
        let total = d.total();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "distribution total is {total:.15}, expected 1"
            )));
        }
        Ok(d)
    }

    /// Subnormalized weights (total ≤ 1).
    pub fn subnormalized(
        dims: Vec<usize>,
        probs: impl IntoIterator<Item = (IndexTuple, f64)>,
    ) -> Result<Self> {
        let d = Self::collect(dims, probs, false)?;
        if d.total() > 1.0 + NORM_TOL {
            return Err(Error::Validation(format!(
                "subnormalized total {} exceeds 1",
                d.total()
            )));
        }
        Ok(d)
    }

    /// Rescales positive weights to total 1.
    pub fn from_weights(
        dims: Vec<usize>,
        weights: impl IntoIterator<Item = (IndexTuple, f64)>,
    ) -> Result<Self> {
        let mut d = Self::collect(dims, weights, true)?;
        let total = d.total();
        if total <= 0.0 {
            return Err(Error::EmptySupport);
        }
        for p in d.probs.values_mut() {
            *p /= total;
        }
        Ok(d)
    }

    fn collect(
        dims: Vec<usize>,
        probs: impl IntoIterator<Item = (IndexTuple, f64)>,
        normalized: bool,
    ) -> Result<Self> {
        check_dims(&dims)?;
        let mut map = BTreeMap::new();
        for (idx, p) in probs {
            check_tuple(&dims, &idx)?;
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::Validation(format!("invalid weight {p}")));
            }
            if p > 0.0 {
                *map.entry(idx).or_insert(0.0) += p;
            }
        }
        Ok(Self {
            dims,
            probs: map,
            normalized,
        })
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &BTreeMap<IndexTuple, f64> {
        &self.probs
    }

    pub fn prob(&self, idx: &[usize]) -> f64 {
        self.probs.get(idx).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Whether normalization to 1 was asserted at construction.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn require_normalized(&self) -> Result<()> {
        let total = self.total();
        if !self.normalized || (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "normalized distribution required (total {total:.15})"
            )));
        }
        Ok(())
    }

    pub fn support(&self) -> Result<SupportSet> {
        SupportSet::new(self.dims.clone(), self.probs.keys().cloned())
    }

    /// Marginal on the sites selected by `mask` (bit `j` ↔ site `j`), keyed by
    /// the projected tuple in site order.
    pub fn marginal(&self, mask: u32) -> BTreeMap<IndexTuple, f64> {
        let sites: Vec<usize> = (0..self.k()).filter(|j| mask >> j & 1 == 1).collect();
        let mut out = BTreeMap::new();
        for (idx, &p) in &self.probs {
            let key: IndexTuple = sites.iter().map(|&j| idx[j]).collect();
            *out.entry(key).or_insert(0.0) += p;
        }
        out
    }

    /// Single-site marginal as a dense vector of length `dims[site]`.
    pub fn site_marginal(&self, site: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[site]];
        for (idx, &p) in &self.probs {
            out[idx[site]] += p;
        }
        out
    }

    pub fn permute_parties(&self, order: &[usize]) -> Result<Self> {
        let dims = order.iter().map(|&j| self.dims[j]).collect();
        let probs = self
            .probs
            .iter()
            .map(|(idx, &p)| (order.iter().map(|&j| idx[j]).collect(), p));
        let mut d = Self::collect(dims, probs, self.normalized)?;
        d.normalized = self.normalized;
        Ok(d)
    }
}

/// A nonempty set of index tuples inside `I_1 × ⋯ × I_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    dims: Vec<usize>,
    elements: BTreeSet<IndexTuple>,
}

impl SupportSet {
    pub fn new(dims: Vec<usize>, elements: impl IntoIterator<Item = IndexTuple>) -> Result<Self> {
        check_dims(&dims)?;
        let mut set = BTreeSet::new();
        for e in elements {
            check_tuple(&dims, &e)?;
            set.insert(e);
        }
        if set.is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(Self { dims, elements: set })
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn elements(&self) -> &BTreeSet<IndexTuple> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, idx: &[usize]) -> bool {
        self.elements.contains(idx)
    }

    /// Uniform distribution on the support.
    pub fn uniform(&self) -> JointDistribution {
        let p = 1.0 / self.len() as f64;
        JointDistribution::from_weights(
            self.dims.clone(),
            self.elements.iter().map(|e| (e.clone(), p)),
        )
        .expect("support is nonempty and in range")
    }
}

/// A unitary acting on one site.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    site: usize,
    dim: usize,
    /// Row-major `dim × dim`.
    matrix: Vec<Complex64>,
}

impl LocalUnitary {
    pub fn new(site: usize, dim: usize, matrix: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        let u = Self { site, dim, matrix };
        for r in 0..dim {
            for c in 0..dim {
                let dot: Complex64 = (0..dim).map(|t| u.entry(r, t) * u.entry(c, t).conj()).sum();
                let want = if r == c { 1.0 } else { 0.0 };
                if (dot - want).norm() > UNITARY_TOL {
                    return Err(Error::Validation(format!(
                        "matrix is not unitary: (U U†)[{r},{c}] = {dot}"
                    )));
                }
            }
        }
        Ok(u)
    }

    pub fn identity(site: usize, dim: usize) -> Self {
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { site, dim, matrix: m }
    }

    pub fn hadamard(site: usize) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = [s, s, s, -s].map(|x| Complex64::new(x, 0.0)).to_vec();
        Self { site, dim: 2, matrix: m }
    }

    /// Permutation matrix sending basis state `b` to `perm[b]`.
    pub fn permutation(site: usize, perm: &[usize]) -> Result<Self> {
        let dim = perm.len();
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (b, &a) in perm.iter().enumerate() {
            if a >= dim {
                return Err(Error::Validation("permutation entry out of range".into()));
            }
            m[a * dim + b] = Complex64::new(1.0, 0.0);
        }
        Self::new(site, dim, m)
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim + col]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ghz_distribution() {
        let d = ghz(2, 3).unwrap().distribution();
        assert_eq!(d.probs().len(), 2);
        assert!((d.prob(&[0, 0, 0]) - 0.5).abs() < 1e-15);
        assert!((d.prob(&[1, 1, 1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn w_distribution_is_uniform() {
        let d = w(3).unwrap().distribution();
        for idx in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            assert!((d.prob(&idx) - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_w_distribution() {
        let d = asymmetric_w(0.2).unwrap().distribution();
        assert!((d.prob(&[1, 0, 0]) - 0.2).abs() < 1e-15);
        assert!((d.prob(&[0, 1, 0]) - 0.2).abs() < 1e-15);
        assert!((d.prob(&[0, 0, 1]) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let err = PureState::new(vec![2, 2], [(vec![0, 0], c(0.5))]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn out_of_range_index_rejected() {
        assert!(PureState::new(vec![2, 2], [(vec![0, 2], c(1.0))]).is_err());
        assert!(PureState::new(vec![2, 2], [(vec![0], c(1.0))]).is_err());
    }

    #[test]
    fn supports() {
        let s = w(3).unwrap().support();
        let want: BTreeSet<IndexTuple> = [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]].into();
        assert_eq!(s.elements(), &want);

        let g = ghz(4, 3).unwrap().support();
        assert_eq!(g.len(), 4);
        assert!((0..4).all(|r| g.contains(&[r, r, r])));

        let single = PureState::new(
            vec![2, 2, 2],
            [(vec![0, 1, 0], c(1.0)), (vec![1, 1, 1], c(0.0))],
        )
        .unwrap();
        assert_eq!(single.support().len(), 1);
    }

    #[test]
    fn empty_support_is_an_error() {
        assert_eq!(
            PureState::new(vec![2, 2], [(vec![0, 0], c(0.0))]).unwrap_err(),
            Error::EmptySupport
        );
        assert_eq!(SupportSet::new(vec![2, 2], []).unwrap_err(), Error::EmptySupport);
    }

    #[test]
    fn identity_rotation_is_noop() {
        let s = rohrlich(0.3).unwrap();
        let r = s.apply_local_unitary(&LocalUnitary::identity(1, 2)).unwrap();
        assert_eq!(s, r);
    }

    #[test]
    fn hadamard_turns_balanced_rohrlich_into_ghz() {
        let s = rohrlich(0.5).unwrap();
        let r = s.apply_local_unitary(&LocalUnitary::hadamard(0)).unwrap();
        let d = r.distribution();
        assert_eq!(d.probs().len(), 2);
        assert!((d.prob(&[0, 0, 0]) - 0.5).abs() < 1e-12);
        assert!((d.prob(&[1, 1, 1]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hadamard_is_an_involution() {
        let s = rohrlich(0.3).unwrap();
        let h = LocalUnitary::hadamard(0);
        let back = s.apply_local_unitary(&h).unwrap().apply_local_unitary(&h).unwrap();
        assert_eq!(back.amps().len(), s.amps().len());
        for (idx, a) in s.amps() {
            assert!((back.amplitude(idx) - a).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_dimension_mismatch() {
        let s = permutation_superposition(3).unwrap();
        let err = s.apply_local_unitary(&LocalUnitary::hadamard(0)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn non_unitary_rejected() {
        let m = [1.0, 1.0, 0.0, 1.0].map(c).to_vec();
        assert!(LocalUnitary::new(0, 2, m).is_err());
    }

    #[test]
    fn permutation_unitary_permutes_support() {
        let s = w(3).unwrap();
        let flipped = s
            .apply_local_unitary(&LocalUnitary::permutation(2, &[1, 0]).unwrap())
            .unwrap();
        let want: BTreeSet<IndexTuple> = [vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 0]].into();
        assert_eq!(flipped.support().elements(), &want);
    }

    #[test]
    fn tensor_power_of_ghz() {
        let s = ghz(2, 3).unwrap().tensor_power(3).unwrap();
        assert_eq!(s.dims(), &[8, 8, 8]);
        assert_eq!(s.amps().len(), 8);
        for (idx, a) in s.amps() {
            assert!(idx[0] == idx[1] && idx[1] == idx[2]);
            assert!((a.norm_sqr() - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn tensor_power_guard() {
        let s = permutation_superposition(4).unwrap();
        assert!(matches!(s.tensor_power(6), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn permute_parties_moves_coordinates() {
        let s = asymmetric_w(0.2).unwrap().permute_parties(&[2, 0, 1]).unwrap();
        let d = s.distribution();
        assert!((d.prob(&[1, 0, 0]) - 0.6).abs() < 1e-15);
        assert!((d.prob(&[0, 1, 0]) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn marginals() {
        let d = w(3).unwrap().distribution();
        let m = d.site_marginal(0);
        assert!((m[0] - 2.0 / 3.0).abs() < 1e-15);
        let pair = d.marginal(0b011);
        assert_eq!(pair.len(), 3);
        assert!((pair[&vec![0, 0]] - 1.0 / 3.0).abs() < 1e-15);
    }
}
