//! Cyclic Jacobi for real symmetric matrices, applied to Hermitian ones via
//! the embedding `A + iB ↦ [[A, −B], [B, A]]`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

pub(crate) fn check_hermitian(dim: usize, m: &[Complex64]) -> Result<()> {
    if m.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            got: m.len(),
        });
    }
    for r in 0..dim {
        for c in r..dim {
            let d = m[r * dim + c] - m[c * dim + r].conj();
            if d.norm() > HERMITIAN_TOL || !d.re.is_finite() || !d.im.is_finite() {
                return Err(Error::Validation(format!("matrix is not Hermitian at ({r}, {c})")));
            }
        }
    }
    Ok(())
}

fn embed(dim: usize, m: &[Complex64]) -> Vec<Vec<f64>> {
    let n = 2 * dim;
    let mut s = vec![vec![0.0; n]; n];
    for r in 0..dim {
        for c in 0..dim {
            // symmetrize so the rotations see an exactly symmetric input
            let z = (m[r * dim + c] + m[c * dim + r].conj()) * 0.5;
            s[r][c] = z.re;
            s[r + dim][c + dim] = z.re;
            s[r][c + dim] = -z.im;
            s[r + dim][c] = z.im;
        }
    }
    s
}

/// Eigenvalues and column eigenvectors of a real symmetric matrix.
fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let scale = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off < OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
                #[allow(clippy::needless_range_loop)] // rows p and q are updated together
                for k in 0..n {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = c * x - s * y;
                    a[q][k] = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Ascending eigenvalues of a Hermitian matrix given row-major.
pub fn eigenvalues_hermitian(dim: usize, m: &[Complex64]) -> Result<Vec<f64>> {
    check_hermitian(dim, m)?;
    let (mut ev, _) = jacobi(embed(dim, m));
    ev.sort_by(f64::total_cmp);
    // the embedding doubles every eigenvalue
    Ok(ev.into_iter().step_by(2).collect())
}

/// `f(H)` for Hermitian `H`, computed on the embedding; the top-left and
/// bottom-left blocks of `f(embed(H))` are `Re f(H)` and `Im f(H)`.
pub(crate) fn hermitian_function(dim: usize, m: &[Complex64], f: impl Fn(f64) -> f64) -> Result<Vec<Complex64>> {
    check_hermitian(dim, m)?;
    let (ev, v) = jacobi(embed(dim, m));
    let fe: Vec<f64> = ev.iter().map(|&x| f(x)).collect();
    let n = 2 * dim;
    let entry = |r: usize, c: usize| (0..n).map(|i| v[r][i] * fe[i] * v[c][i]).sum::<f64>();
    Ok((0..dim * dim)
        .map(|rc| {
            let (r, c) = (rc / dim, rc % dim);
            Complex64::new(entry(r, c), entry(r + dim, c))
        })
        .collect())
}
