//! Reduced density matrices of pure states and the bipartite quantities
//! used to compare against other GHZ distillation rates.

mod jacobi;

use std::collections::BTreeMap;

use num_complex::Complex64;

pub use jacobi::{eigenvalues_hermitian, HERMITIAN_TOL, OFF_DIAGONAL_TOL};

use crate::entropy::{binary_entropy, shannon_weights, SubsetMask};
use crate::error::{Error, Result};
use crate::states::{IndexTuple, PureState};

/// Largest matrix dimension accepted for a reduced state.
pub const MAX_DENSITY_DIM: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let ev = eigenvalues_hermitian(dim, &entries)?;
        let trace: f64 = (0..dim).map(|i| entries[i * dim + i].re).sum();
        if (trace - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::Validation(format!("trace is {trace}, expected 1")));
        }
        if ev.first().is_some_and(|&l| l < -HERMITIAN_TOL) {
            return Err(Error::Validation(format!("negative eigenvalue {}", ev[0])));
        }
        Ok(Self { dim, entries })
    }

    pub fn pure(amps: &[Complex64]) -> Result<Self> {
        let d = amps.len();
        Self::new(d, (0..d * d).map(|rc| amps[rc / d] * amps[rc % d].conj()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.dim + c]
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_hermitian(self.dim, &self.entries).expect("validated on construction")
    }

    /// `λρ + (1−λ)𝟙/d`.
    pub fn depolarized(&self, lambda: f64) -> Result<Self> {
        let d = self.dim;
        let e = (0..d * d)
            .map(|rc| {
                let id = if rc / d == rc % d { 1.0 / d as f64 } else { 0.0 };
                self.entries[rc] * lambda + (1.0 - lambda) * id
            })
            .collect();
        Self::new(d, e)
    }
}

/// `Tr_{keep̄} |ψ⟩⟨ψ|`, with the kept sites in increasing order and the
/// first kept site most significant in the row index.
pub fn reduced_density(psi: &PureState, keep: SubsetMask) -> Result<DensityMatrix> {
    let k = psi.k();
    if keep.is_empty() || !keep.is_proper(k) {
        return Err(Error::Validation(format!("{keep} is not a proper nonempty subset of the parties")));
    }
    let kept: Vec<usize> = keep.sites().collect();
    let dim: usize = kept.iter().map(|&j| psi.dims()[j]).product();
    if dim > MAX_DENSITY_DIM {
        return Err(Error::TooLarge {
            what: "reduced density dimension",
            size: dim as u128,
            limit: MAX_DENSITY_DIM as u128,
        });
    }
    let mut by_rest: BTreeMap<IndexTuple, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (idx, &a) in psi.amps() {
        let row = kept.iter().fold(0, |acc, &j| acc * psi.dims()[j] + idx[j]);
        let rest = (0..k).filter(|&j| !keep.contains(j)).map(|j| idx[j]).collect();
        by_rest.entry(rest).or_default().push((row, a));
    }
    let norm = psi.norm_sqr();
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    for group in by_rest.values() {
        for &(r, a) in group {
            for &(c, b) in group {
                rho[r * dim + c] += a * b.conj() / norm;
            }
        }
    }
    DensityMatrix::new(dim, rho)
}

/// `−Tr ρ log₂ ρ`, with eigenvalues below zero clipped.
pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    shannon_weights(rho.eigenvalues().into_iter().map(|l| l.max(0.0)))
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    Ok(())
}

/// Eigenvalues of a density matrix at or below this are rounding noise.
const EIGEN_FLOOR: f64 = 1e-13;

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho)?;
    // Wootters' λ_i are the singular values of τ = W·Y·conj(W) with W = √ρ and
    // Y = σ_y ⊗ σ_y (anti-diagonal, signs −1, 1, 1, −1). Reading them off the
    // Hermitian block [[0, τ], [τ†, 0]] avoids square roots of rounding noise.
    // Eigenvalues of ρ below the noise floor are treated as exact zeros.
    let root = jacobi::hermitian_function(4, rho.entries(), |x| if x > EIGEN_FLOOR { x.sqrt() } else { 0.0 })?;
    let sign = |i: usize| if i == 0 || i == 3 { -1.0 } else { 1.0 };
    let tau: Vec<Complex64> = (0..16)
        .map(|rc| {
            let (r, c) = (rc / 4, rc % 4);
            (0..4).map(|i| root[r * 4 + i] * sign(i) * root[(3 - i) * 4 + c].conj()).sum()
        })
        .collect();
    let mut block = vec![Complex64::new(0.0, 0.0); 64];
    for r in 0..4 {
        for c in 0..4 {
            block[r * 8 + 4 + c] = tau[r * 4 + c];
            block[(4 + c) * 8 + r] = tau[r * 4 + c].conj();
        }
    }
    let ev = eigenvalues_hermitian(8, &block)?;
    let l: Vec<f64> = ev[4..].iter().rev().map(|x| x.max(0.0)).collect();
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Entanglement of formation of a two-qubit state, in ebits.
pub fn eof(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?.min(1.0);
    Ok(binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0))
}

fn single_site_entropies(psi: &PureState) -> Result<Vec<f64>> {
    (0..psi.k())
        .map(|j| Ok(von_neumann(&reduced_density(psi, SubsetMask::from_sites(&[j]))?)))
        .collect()
}

/// The best of the two-pair EPR-then-teleport strategy over party roles and
/// the three breakpoints of its piecewise-affine dependence on `t`, with
/// the entanglement cost replaced by the entanglement of formation.
pub fn smolin_bound(psi: &PureState) -> Result<f64> {
    if psi.k() != 3 {
        return Err(Error::Precondition(format!("three parties required, got {}", psi.k())));
    }
    if psi.dims().iter().any(|&d| d != 2) {
        return Err(Error::Precondition(format!(
            "qubit sites required for the two-qubit formula, got dims {:?}",
            psi.dims()
        )));
    }
    let h = single_site_entropies(psi)?;
    let pair = |a: usize, b: usize| -> Result<f64> { eof(&reduced_density(psi, SubsetMask::from_sites(&[a, b]))?) };
    let e = [[0.0, pair(0, 1)?, pair(0, 2)?], [0.0, 0.0, pair(1, 2)?]];
    let ef = |a: usize, b: usize| if a < b { e[a][b] } else { e[b][a] };

    let mut best = f64::NEG_INFINITY;
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let (e_ab, e_ac) = (ef(a, b), ef(a, c));
        let (m_ab, m_ac) = (h[a].min(h[b]), h[a].min(h[c]));
        let value = |t: f64| t * (m_ab - e_ab) + (1.0 - t) * (m_ac - e_ac) + (t * e_ab).min((1.0 - t) * e_ac);
        best = best.max(value(0.0)).max(value(1.0));
        if e_ab + e_ac > 0.0 {
            best = best.max(value(e_ac / (e_ab + e_ac)));
        }
    }
    Ok(best)
}

/// `max_a min{H(ρ_a)/(k−1), min_{b≠a} H(ρ_b)}`; for three parties this is
/// the root-plus-two-leaves combing bound.
pub fn streltsov_bound(psi: &PureState) -> Result<f64> {
    let k = psi.k();
    if k < 3 {
        return Err(Error::Precondition(format!("at least three parties required, got {k}")));
    }
    let h = single_site_entropies(psi)?;
    Ok((0..k)
        .map(|a| {
            (0..k)
                .filter(|&b| b != a)
                .map(|b| h[b])
                .fold(h[a] / (k - 1) as f64, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Smallest single-party entropy: the GHZ rate cannot exceed the
/// entanglement across any one-versus-rest cut.
pub fn cut_upper_bound(psi: &PureState) -> Result<f64> {
    Ok(single_site_entropies(psi)?.into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{asymmetric_w, ghz, rohrlich, w};

    #[test]
    fn w3_marginal() {
        let rho = reduced_density(&w(3).unwrap(), SubsetMask::from_sites(&[0])).unwrap();
        assert!((rho.entry(0, 0).re - 2.0 / 3.0).abs() < 1e-15);
        assert!((rho.entry(1, 1).re - 1.0 / 3.0).abs() < 1e-15);
        assert!((von_neumann(&rho) - binary_entropy(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let rho = DensityMatrix::pure(&[Complex64::new(s, 0.0), z, z, Complex64::new(s, 0.0)]).unwrap();
        assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-10);
        assert!((eof(&rho).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rohrlich_zero_bc_is_epr() {
        let rho = reduced_density(&rohrlich(0.0).unwrap(), SubsetMask::from_sites(&[1, 2])).unwrap();
        assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn comparison_bounds() {
        let w3 = w(3).unwrap();
        assert!((smolin_bound(&w3).unwrap() - 0.64327).abs() < 2e-4);
        assert!((streltsov_bound(&w3).unwrap() - binary_entropy(1.0 / 3.0) / 2.0).abs() < 1e-12);
        let g = ghz(2, 3).unwrap();
        assert!((smolin_bound(&g).unwrap() - 1.0).abs() < 1e-12);
        assert!((streltsov_bound(&g).unwrap() - 0.5).abs() < 1e-12);
        let p = 0.2;
        let aw = asymmetric_w(p).unwrap();
        let expect = binary_entropy(p).min(binary_entropy(1.0 - 2.0 * p));
        assert!((cut_upper_bound(&aw).unwrap() - expect).abs() < 1e-12);
        assert!(smolin_bound(&ghz(3, 3).unwrap()).is_err());
    }
}
