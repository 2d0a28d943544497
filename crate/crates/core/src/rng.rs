//! Counter-based random numbers for reproducible experiments.
//!
//! Experiments must be bit-reproducible across runs, threads, and language
//! ports, so instead of a stateful generator from a crate we use an explicit
//! 64-bit counter scheme built on the SplitMix64 finalizer:
//!
//! ```text
//! s0     = mix64(seed XOR mix64(stream))
//! out_k  = mix64(s0 +w (k+1) *w 0x9E3779B97F4A7C15)      (k = 0, 1, 2, ...)
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer
//!
//! ```text
//! z ^= z >> 30;  z *w= 0xBF58476D1CE4E5B9;
//! z ^= z >> 27;  z *w= 0x94D049BB133111EB;
//! z ^= z >> 31;
//! ```
//!
//! (`+w`, `*w` wrap modulo 2^64).  Uniforms take the top 53 bits:
//! `u = (out >> 11) / 2^53 in [0, 1)`.  Normals come from Box-Muller on two
//! consecutive uniforms, consuming the stream in pairs with the second value
//! cached.  Each Monte-Carlo trial owns the stream `(seed, trial_index)`, so
//! results do not depend on scheduling.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic counter-based generator; see the module docs for the
/// exact output sequence.
#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
    counter: u64,
    cached_normal: Option<f64>,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        CounterRng {
            state: mix64(seed ^ mix64(stream)),
            counter: 0,
            cached_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.state.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Standard normal via Box-Muller; values are produced in pairs.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

use num_complex::Complex64;

use crate::linalg::{ComplexMatrix, RealMatrix};

impl CounterRng {
    /// Complex number with independent standard-normal parts.
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    /// Uniform point on the unit circle.
    pub fn unit_complex(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.uniform())
    }

    /// n x n matrix with i.i.d. complex-normal entries (row-major order).
    pub fn complex_matrix(&mut self, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |_, _| self.complex_normal())
    }

    /// rows x cols real matrix with i.i.d. standard-normal entries
    /// (row-major order).
    pub fn real_matrix(&mut self, rows: usize, cols: usize) -> RealMatrix {
        let mut m = RealMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.normal());
            }
        }
        m
    }

    /// Random unit vector in C^n.
    pub fn unit_vector(&mut self, n: usize) -> Vec<Complex64> {
        loop {
            let v: Vec<Complex64> = (0..n).map(|_| self.complex_normal()).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                return v.iter().map(|z| z / norm).collect();
            }
        }
    }

    /// Haar-ish random unitary: Gram-Schmidt of a complex Gaussian matrix.
    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        loop {
            let g = self.complex_matrix(n);
            if let Some(q) = gram_schmidt(&g) {
                return q;
            }
        }
    }
}

fn gram_schmidt(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = g.n();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for i in 0..n {
                    let correction = proj * cols[k][i];
                    cols[j][i] -= correction;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    Some(ComplexMatrix::from_fn(n, |i, j| cols[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = CounterRng::new(42, 7);
        let mut b = CounterRng::new(42, 7);
        let mut c = CounterRng::new(42, 8);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let zs: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn normals_have_sane_moments() {
        let mut rng = CounterRng::new(1, 0);
        let n = 20000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let z = rng.normal();
            sum += z;
            sumsq += z * z;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = CounterRng::new(3, 1);
        let u = rng.unitary(5);
        let err = (&u.adjoint() * &u).sub(&ComplexMatrix::identity(5)).fro_norm();
        assert!(err < 1e-12, "U*U - I = {err:.3e}");
    }
}
