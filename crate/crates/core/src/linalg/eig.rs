use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianMatrix};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted descending; column `k` of `vectors` is a
/// unit eigenvector for `values[k]`, with its first significant component
/// made real positive so the output is deterministic.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// Gap between the two largest eigenvalues (infinite for n = 1).
    pub fn top_gap(&self) -> f64 {
        if self.values.len() < 2 {
            f64::INFINITY
        } else {
            self.values[0] - self.values[1]
        }
    }
}

/// Unitary 2x2 rotation diagonalizing the Hermitian block
/// `[[alpha, beta], [conj(beta), gamma]]` (alpha, gamma real).
///
/// Returns `u` as `[u11, u12, u21, u22]` with `u* M u` diagonal.  The
/// rotation is the classical Jacobi rotation composed with the phase that
/// makes the off-diagonal entry real.
fn hermitian_2x2_rotation(alpha: f64, beta: Complex64, gamma: f64) -> [Complex64; 4] {
    let b = beta.norm();
    if b == 0.0 {
        return [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
    }
    let phase = beta / b;
    let tau = (gamma - alpha) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // u = diag(phase, 1) * [[c, s], [-s, c]]
    [
        phase * c,
        phase * s,
        Complex64::new(-s, 0.0),
        Complex64::new(c, 0.0),
    ]
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.n();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
///
/// Deterministic for a fixed input: fixed sweep order, descending eigenvalue
/// sort (stable), eigenvector phases fixed by the first significant
/// component.  Errors only if 100 sweeps do not reach off-diagonal norm
/// `1e-14 * ||A||`, which does not happen for finite Hermitian input of
/// these sizes.
pub fn eigh(a: &HermitianMatrix) -> Result<EigDecomposition> {
    let n = a.n();
    let mut m = a.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    if n == 1 {
        return Ok(EigDecomposition {
            values: vec![m[(0, 0)].re],
            vectors: v,
        });
    }
    let scale = m.fro_norm();
    let target = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let beta = m[(p, q)];
                if beta.norm() <= target / (n as f64) {
                    continue;
                }
                let u = hermitian_2x2_rotation(m[(p, p)].re, beta, m[(q, q)].re);
                apply_rotation_two_sided(&mut m, p, q, &u);
                apply_rotation_columns(&mut v, p, q, &u);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > target {
        return Err(Error::NoConvergence(format!(
            "jacobi eigensolver: off-diagonal {:.3e} after {MAX_SWEEPS} sweeps",
            off_diagonal_norm(&m)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        let col = fix_phase(&v.column(old_col));
        for i in 0..n {
            vectors[(i, new_col)] = col[i];
        }
    }
    Ok(EigDecomposition { values, vectors })
}

/// m <- u* m u on rows/columns (p, q).
fn apply_rotation_two_sided(m: &mut ComplexMatrix, p: usize, q: usize, u: &[Complex64; 4]) {
    let n = m.n();
    // Columns: m <- m u.
    for i in 0..n {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * u[0] + mq * u[2];
        m[(i, q)] = mp * u[1] + mq * u[3];
    }
    // Rows: m <- u* m.
    for j in 0..n {
        let mp = m[(p, j)];
        let mq = m[(q, j)];
        m[(p, j)] = u[0].conj() * mp + u[2].conj() * mq;
        m[(q, j)] = u[1].conj() * mp + u[3].conj() * mq;
    }
    // Restore exact Hermitian structure on the touched entries.
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    let dp = m[(p, p)].re;
    let dq = m[(q, q)].re;
    m[(p, p)] = Complex64::new(dp, 0.0);
    m[(q, q)] = Complex64::new(dq, 0.0);
}

/// v <- v u on columns (p, q).
fn apply_rotation_columns(v: &mut ComplexMatrix, p: usize, q: usize, u: &[Complex64; 4]) {
    let n = v.n();
    for i in 0..n {
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * u[0] + vq * u[2];
        v[(i, q)] = vp * u[1] + vq * u[3];
    }
}

/// Multiplies by a unit phase so the first component with significant
/// modulus becomes real positive.
fn fix_phase(col: &[Complex64]) -> Vec<Complex64> {
    let max_abs = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_abs == 0.0 {
        return col.to_vec();
    }
    let lead = col
        .iter()
        .find(|z| z.norm() > 1e-8 * max_abs)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    col.iter().map(|z| z * phase).collect()
}

/// Eigenvalues only (descending), skipping eigenvector accumulation; the
/// hot scan paths only need the top of the spectrum.
pub fn eigh_values(a: &HermitianMatrix) -> Result<Vec<f64>> {
    let n = a.n();
    let mut m = a.as_matrix().clone();
    if n == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    let scale = m.fro_norm();
    let target = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let beta = m[(p, q)];
                if beta.norm() <= target / (n as f64) {
                    continue;
                }
                let u = hermitian_2x2_rotation(m[(p, p)].re, beta, m[(q, q)].re);
                apply_rotation_two_sided(&mut m, p, q, &u);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > target {
        return Err(Error::NoConvergence(format!(
            "jacobi eigensolver: off-diagonal {:.3e} after {MAX_SWEEPS} sweeps",
            off_diagonal_norm(&m)
        )));
    }
    let mut values: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(values)
}

/// Singular values and right singular vectors from one-sided Jacobi.
#[derive(Debug, Clone)]
pub struct ColumnSvd {
    /// Singular values, descending.
    pub sigma: Vec<f64>,
    /// Right singular vectors; `v[k]` pairs with `sigma[k]` and the input
    /// columns satisfy `sum_j cols[j] v[k][j] = sigma[k] * (unit vector)`.
    pub v: Vec<Vec<Complex64>>,
}

/// One-sided Jacobi on a set of equal-length complex columns.
///
/// Orthogonalizes the columns by right rotations; the resulting column
/// norms are the singular values of the matrix whose columns were passed
/// in.  Works for any rectangular shape and is accurate for tiny singular
/// values, which the kernel and rank computations rely on.
pub fn svd_columns(cols: &[Vec<Complex64>]) -> ColumnSvd {
    let k = cols.len();
    let mut work: Vec<Vec<Complex64>> = cols.to_vec();
    let mut v: Vec<Vec<Complex64>> = (0..k)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); k];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    if k > 0 {
        let eps = 1e-15;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..k.saturating_sub(1) {
                for q in p + 1..k {
                    let app: f64 = work[p].iter().map(|z| z.norm_sqr()).sum();
                    let aqq: f64 = work[q].iter().map(|z| z.norm_sqr()).sum();
                    let apq: Complex64 = work[p]
                        .iter()
                        .zip(work[q].iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    if apq.norm() <= eps * (app * aqq).sqrt() || apq.norm() == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let u = hermitian_2x2_rotation(app, apq, aqq);
                    rotate_pair(&mut work, p, q, &u);
                    rotate_pair(&mut v, p, q, &u);
                }
            }
            if !rotated {
                break;
            }
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    let norms: Vec<f64> = work
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    ColumnSvd {
        sigma: order.iter().map(|&i| norms[i]).collect(),
        v: order.iter().map(|&i| fix_phase(&v[i])).collect(),
    }
}

fn rotate_pair(cols: &mut [Vec<Complex64>], p: usize, q: usize, u: &[Complex64; 4]) {
    let len = cols[p].len();
    for i in 0..len {
        let xp = cols[p][i];
        let xq = cols[q][i];
        cols[p][i] = xp * u[0] + xq * u[2];
        cols[q][i] = xp * u[1] + xq * u[3];
    }
}

/// Largest singular value.
pub fn spectral_norm(x: &ComplexMatrix) -> f64 {
    let cols: Vec<Vec<Complex64>> = (0..x.n()).map(|j| x.column(j)).collect();
    svd_columns(&cols).sigma.first().copied().unwrap_or(0.0)
}

/// Orthonormal basis of the numerical null space
/// `{ v : ||Xv|| <= tol * sigma_max * ||v|| }`, from the right singular
/// vectors with `sigma <= tol * sigma_max`.  Returns the full standard
/// basis for the zero matrix, an empty list for a trivial kernel.
pub fn kernel_basis(x: &ComplexMatrix, tol: f64) -> Vec<Vec<Complex64>> {
    let cols: Vec<Vec<Complex64>> = (0..x.n()).map(|j| x.column(j)).collect();
    let svd = svd_columns(&cols);
    let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
    svd.sigma
        .iter()
        .zip(svd.v.iter())
        .filter(|(s, _)| **s <= tol * sigma_max)
        .map(|(_, v)| v.clone())
        .collect()
}
