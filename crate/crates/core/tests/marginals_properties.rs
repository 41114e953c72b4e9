use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ghz_forge::bounds::theorem1_bound;
use ghz_forge::entropy::{binary_entropy, shannon_weights, SubsetMask};
use ghz_forge::marginals::{
    concurrence, cut_upper_bound, eigenvalues_hermitian, eof, reduced_density, smolin_bound, streltsov_bound,
    DensityMatrix,
};
use ghz_forge::states::{asymmetric_w, ghz_p, rohrlich, PureState};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_hermitian(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
    let mut m = vec![c(0.0, 0.0); n * n];
    for r in 0..n {
        m[r * n + r] = c(rng.gen_range(-1.0..1.0), 0.0);
        for col in r + 1..n {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[r * n + col] = z;
            m[col * n + r] = z.conj();
        }
    }
    m
}

fn random_pure(rng: &mut StdRng, dims: &[usize]) -> PureState {
    let total: usize = dims.iter().product();
    let amps = (0..total).map(|mut r| {
        let mut idx = vec![0; dims.len()];
        for j in (0..dims.len()).rev() {
            idx[j] = r % dims[j];
            r /= dims[j];
        }
        (idx, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    });
    PureState::normalized(dims.to_vec(), amps).unwrap()
}

#[test]
fn spectrum_matches_dense_solver() {
    let mut rng = StdRng::seed_from_u64(10);
    for n in [1, 2, 3, 6, 8] {
        for _ in 0..50 {
            let m = random_hermitian(&mut rng, n);
            let ours = eigenvalues_hermitian(n, &m).unwrap();
            let dense = DMatrix::from_row_slice(n, n, &m);
            let mut theirs: Vec<f64> = dense.symmetric_eigenvalues().iter().cloned().collect();
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10, "{ours:?} vs {theirs:?}");
            }
            let trace: f64 = (0..n).map(|i| m[i * n + i].re).sum();
            assert!((ours.iter().sum::<f64>() - trace).abs() < 1e-10);
        }
    }
}

/// Trigonometric solution of the characteristic cubic of a 3×3 Hermitian
/// matrix.
fn cubic_eigenvalues(m: &[Complex64]) -> [f64; 3] {
    let a = |r: usize, col: usize| m[r * 3 + col];
    let q = (a(0, 0).re + a(1, 1).re + a(2, 2).re) / 3.0;
    let p1 = a(0, 1).norm_sqr() + a(0, 2).norm_sqr() + a(1, 2).norm_sqr();
    let p2 = (a(0, 0).re - q).powi(2) + (a(1, 1).re - q).powi(2) + (a(2, 2).re - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = |r: usize, col: usize| (a(r, col) - if r == col { c(q, 0.0) } else { c(0.0, 0.0) }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let phi = (det.re / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let mut e = [e3, 3.0 * q - e1 - e3, e1];
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn three_by_three_closed_form() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let m = random_hermitian(&mut rng, 3);
        let ours = eigenvalues_hermitian(3, &m).unwrap();
        for (a, b) in ours.iter().zip(cubic_eigenvalues(&m)) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn complementary_marginals_share_spectra() {
    let mut rng = StdRng::seed_from_u64(12);
    for dims in [vec![2, 2, 2], vec![3, 2, 2], vec![2, 3, 2, 2]] {
        let k = dims.len();
        for _ in 0..20 {
            let psi = random_pure(&mut rng, &dims);
            for m in SubsetMask::proper(k) {
                let mut a = reduced_density(&psi, m).unwrap().eigenvalues();
                let mut b = reduced_density(&psi, m.complement(k)).unwrap().eigenvalues();
                a.sort_by(|x, y| y.total_cmp(x));
                b.sort_by(|x, y| y.total_cmp(x));
                let n = a.len().max(b.len());
                a.resize(n, 0.0);
                b.resize(n, 0.0);
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }
}

fn random_two_qubit(rng: &mut StdRng, rank: usize) -> DensityMatrix {
    let g: Vec<Complex64> = (0..4 * rank).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let mut rho = vec![c(0.0, 0.0); 16];
    for r in 0..4 {
        for col in 0..4 {
            rho[r * 4 + col] = (0..rank).map(|t| g[r * rank + t] * g[col * rank + t].conj()).sum();
        }
    }
    let tr: f64 = (0..4).map(|i| rho[i * 5].re).sum();
    DensityMatrix::new(4, rho.into_iter().map(|z| z / tr).collect()).unwrap()
}

fn random_qubit_unitary(rng: &mut StdRng) -> [Complex64; 4] {
    let t: [f64; 4] = [rng.gen_range(0.0..3.2), rng.gen_range(-3.2..3.2), rng.gen_range(-3.2..3.2), rng.gen_range(-3.2..3.2)];
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (co, si) = (t[0].cos(), t[0].sin());
    [e(t[3] + t[1]) * co, -e(t[3] - t[2]) * si, e(t[3] + t[2]) * si, e(t[3] - t[1]) * co]
}

#[test]
fn concurrence_is_local_unitary_invariant() {
    let mut rng = StdRng::seed_from_u64(13);
    for rank in [1, 2, 4] {
        for _ in 0..100 {
            let rho = random_two_qubit(&mut rng, rank);
            let (u1, u2) = (random_qubit_unitary(&mut rng), random_qubit_unitary(&mut rng));
            let u = Matrix4::from_fn(|r, col| u1[(r / 2) * 2 + col / 2] * u2[(r % 2) * 2 + col % 2]);
            let m = Matrix4::from_fn(|r, col| rho.entry(r, col));
            let rotated = u * m * u.adjoint();
            let rotated = DensityMatrix::new(4, (0..16).map(|i| rotated[(i / 4, i % 4)]).collect()).unwrap();
            let (a, b) = (concurrence(&rho).unwrap(), concurrence(&rotated).unwrap());
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }
}

#[test]
fn pure_state_concurrence_formula() {
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..200 {
        let v: Vec<Complex64> = (0..4).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<Complex64> = v.into_iter().map(|z| z / n).collect();
        let want = 2.0 * (v[0] * v[3] - v[1] * v[2]).norm();
        assert!((concurrence(&DensityMatrix::pure(&v).unwrap()).unwrap() - want).abs() < 1e-9);
    }
}

#[test]
fn eof_decreases_under_depolarizing() {
    let mut rng = StdRng::seed_from_u64(15);
    for rank in [1, 2] {
        for _ in 0..50 {
            let rho = random_two_qubit(&mut rng, rank);
            let mut last = f64::INFINITY;
            for i in (0..=20).rev() {
                let e = eof(&rho.depolarized(i as f64 / 20.0).unwrap()).unwrap();
                assert!(e <= last + 1e-12);
                last = e;
            }
        }
    }
}

#[test]
fn lower_bounds_stay_below_cut() {
    let mut rng = StdRng::seed_from_u64(16);
    for _ in 0..200 {
        let psi = random_pure(&mut rng, &[2, 2, 2]);
        let cut = cut_upper_bound(&psi).unwrap();
        assert!(theorem1_bound(&psi.distribution()).unwrap().value <= cut + 1e-9);
        assert!(streltsov_bound(&psi).unwrap() <= cut + 1e-9);
    }
}

#[test]
fn rohrlich_comparisons() {
    for i in 0..=20 {
        let p = i as f64 / 20.0;
        let psi = rohrlich(p).unwrap();
        assert!((smolin_bound(&psi).unwrap() - binary_entropy(p)).abs() < 1e-6, "p = {p}");
        assert!((streltsov_bound(&psi).unwrap() - binary_entropy(p).min(0.5)).abs() < 1e-9);
        assert!((cut_upper_bound(&psi).unwrap() - binary_entropy(p)).abs() < 1e-9);
    }
}

#[test]
fn asymmetric_w_comparisons() {
    let h = binary_entropy;
    for i in 1..50 {
        let p = i as f64 / 100.0;
        let psi = asymmetric_w(p).unwrap();
        // single-site entropies and pair concurrences in closed form
        let ent = [h(p), h(p), h(1.0 - 2.0 * p)];
        let ef = |c: f64| h((1.0 - (1.0 - c * c).sqrt()) / 2.0);
        let cross = ef(2.0 * (p * (1.0 - 2.0 * p)).sqrt());
        let pair = |a: usize, b: usize| if a + b == 1 { ef(2.0 * p) } else { cross };
        let mut smolin = f64::NEG_INFINITY;
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let (mb, mc) = (ent[a].min(ent[b]), ent[a].min(ent[c]));
            let (eb, ec) = (pair(a, b), pair(a, c));
            smolin = smolin.max(mb - eb).max(mc - ec);
            if eb + ec > 0.0 {
                smolin = smolin.max((mb * ec + mc * eb - eb * ec) / (eb + ec));
            }
        }
        assert!((smolin_bound(&psi).unwrap() - smolin).abs() < 1e-6, "p = {p}");
        let strel = h(p).min(h(1.0 - 2.0 * p)).min((h(p) / 2.0).max(h(1.0 - 2.0 * p) / 2.0));
        assert!((streltsov_bound(&psi).unwrap() - strel).abs() < 1e-9);
        let t1 = h(1.0 - 2.0 * p).min(h(p) - p);
        assert!((theorem1_bound(&psi.distribution()).unwrap().value - t1).abs() < 1e-9);
    }
}

#[test]
fn generalized_ghz_comparisons() {
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..30 {
        let d = rng.gen_range(2..=4);
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = w.iter().sum();
        let probs: Vec<f64> = w.iter().map(|x| x / s).collect();
        let hp = shannon_weights(probs.iter().copied());
        for k in 3..=4 {
            let psi = ghz_p(&probs, k).unwrap();
            assert!((streltsov_bound(&psi).unwrap() - hp / (k - 1) as f64).abs() < 1e-9);
            assert!((cut_upper_bound(&psi).unwrap() - hp).abs() < 1e-9);
        }
    }
}
