use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::{Error, Result};

/// Dense square complex matrix, row-major storage.
///
/// The inner product used throughout is `<X, Y> = Re trace(X* Y)`, which
/// makes the n x n complex matrices a real Euclidean space of dimension
/// 2 n^2.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from rows of `(re, im)` pairs; rejects ragged or non-finite
    /// input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &z) in row.iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) is not finite"
                    )));
                }
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    /// Shorthand for small literal matrices in tests and constructors.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self::from_fn(self.n, |i, j| alpha * self[(i, j)])
    }

    pub fn scale_re(&self, alpha: f64) -> Self {
        self.scale(Complex64::new(alpha, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn add_mat(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real inner product `Re trace(X* Y)`.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Integer matrix power by repeated multiplication.
    pub fn pow_int(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Hermitian part `Phi(X) = (X + X*) / 2`.
    pub fn hermitian_part(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrize(self)
    }

    /// Flattens to the real coordinates `(Re, Im)` of each entry, row-major.
    /// The real dot product of two such vectors equals `<X, Y>`.
    pub fn vec_real(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.n * self.n);
        for z in &self.data {
            v.push(z.re);
            v.push(z.im);
        }
        v
    }

    pub fn from_vec_real(n: usize, v: &[f64]) -> Self {
        assert_eq!(v.len(), 2 * n * n);
        let mut m = Self::zeros(n);
        for (k, chunk) in v.chunks_exact(2).enumerate() {
            m.data[k] = Complex64::new(chunk[0], chunk[1]);
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.add_mat(rhs)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.sub(rhs)
    }
}

/// Hermitian matrix; the constructor symmetrizes, so `entries[i][j]` equals
/// `conj(entries[j][i])` exactly and the diagonal is exactly real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    /// `(X + X*) / 2` with the Hermitian structure enforced bitwise.
    pub fn symmetrize(x: &ComplexMatrix) -> Self {
        let n = x.n();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new((x[(i, i)].re + x[(i, i)].re) / 2.0, 0.0);
            for j in (i + 1)..n {
                let z = (x[(i, j)] + x[(j, i)].conj()) / 2.0;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianMatrix { mat: m }
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn n(&self) -> usize {
        self.mat.n()
    }
}

/// Minimal rectangular real matrix, used by the feedback-control side
/// (A, B, C, K are real there).
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.set(i, j, out.get(i, j) + aik * rhs.get(k, j));
                }
            }
        }
        out
    }

    pub fn add_scaled(&self, rhs: &Self, alpha: f64) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += alpha * b;
        }
        out
    }

    pub fn scale(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= alpha;
        }
        out
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, rhs: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a * b).sum()
    }

    /// Promotes a square real matrix to complex.
    pub fn to_complex(&self) -> ComplexMatrix {
        assert_eq!(self.rows, self.cols);
        ComplexMatrix::from_fn(self.rows, |i, j| Complex64::new(self.get(i, j), 0.0))
    }
}

pub fn vec_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_normalize(a: &[Complex64]) -> Vec<Complex64> {
    let norm = vec_norm(a);
    a.iter().map(|z| z / norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn hermitian_part_of_upper_jordan() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        let h = x.hermitian_part();
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(h.as_matrix(), &expected);
    }

    #[test]
    fn hermitian_part_kills_skew_and_fixes_hermitian() {
        let i_times_identity = ComplexMatrix::identity(3).scale(Complex64::new(0.0, 1.0));
        assert_eq!(i_times_identity.hermitian_part().as_matrix().fro_norm(), 0.0);
        let id = ComplexMatrix::identity(4);
        assert_eq!(id.hermitian_part().as_matrix(), &id);
    }

    #[test]
    fn phi_is_adjoint_of_hermitian_embedding() {
        // <Phi(X), Z> = <X, Z> for Hermitian Z.
        let mut rng = CounterRng::new(11, 0);
        for _ in 0..20 {
            let x = rng.complex_matrix(4);
            let z = HermitianMatrix::symmetrize(&rng.complex_matrix(4));
            let lhs = x.hermitian_part().as_matrix().inner(z.as_matrix());
            let rhs = x.inner(z.as_matrix());
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn inner_product_matches_real_vectorization() {
        let mut rng = CounterRng::new(12, 0);
        let x = rng.complex_matrix(3);
        let y = rng.complex_matrix(3);
        let dot: f64 = x
            .vec_real()
            .iter()
            .zip(y.vec_real().iter())
            .map(|(a, b)| a * b)
            .sum();
        assert!((dot - x.inner(&y)).abs() < 1e-12);
    }
}
