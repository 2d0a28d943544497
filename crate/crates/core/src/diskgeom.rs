//! Disk-matrix detection, subdifferential sampling, and the
//! partial-smoothness certificates.
//!
//! At a disk matrix `X` the subdifferential of the numerical radius is the
//! convex hull of the generators `w g g*` over the circle.  When some
//! invertible `G` turns the moment vector `f(w) = (w, ..., w^n)` into the
//! top eigenvector of `Phi(w* X)` for every `w`, the set of disk matrices
//! is locally a manifold of codimension `2n` with normal space
//! `X-perp intersect span{ G F(w) G* }`, and the numerical radius is partly
//! smooth there.  The operations here check those hypotheses numerically
//! and report every residual they rest on.

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{svd_columns, vec_dot, ComplexMatrix};
use crate::radius::{disk_distortion, support, SupportSample};
use crate::{Error, Result};

/// Irrational angular offset; keeps sample grids from aligning with the
/// symmetry axes of structured test matrices.
const ANGLE_OFFSET: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn sample_angles(m: usize) -> Vec<f64> {
    (0..m)
        .map(|k| ANGLE_OFFSET + 2.0 * std::f64::consts::PI * k as f64 / m as f64)
        .collect()
}

/// Outcome of the equal-eigenvalue disk test.
#[derive(Debug, Clone, Serialize)]
pub struct DiskCheck {
    pub is_disk: bool,
    /// Spread of `lambda_max(Phi(w* X))` over the 2n+1 test angles.
    pub max_deviation: f64,
    /// Dense-grid distortion `r - min support`; guards global use of the
    /// locally sufficient condition.
    pub dense_distortion: f64,
    pub mean_support: f64,
}

/// Tests whether `X` is (numerically) a disk matrix: the support values at
/// `2n + 1` angles must agree, and the dense-grid distortion must vanish.
pub fn is_disk_near(x: &ComplexMatrix, tol: f64) -> DiskCheck {
    let n = x.n();
    let lambdas: Vec<f64> = sample_angles(2 * n + 1)
        .into_iter()
        .map(|theta| support(x, theta).lambda)
        .collect();
    let max = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = lambdas.iter().sum::<f64>() / lambdas.len() as f64;
    let spread = max - min;
    let dense = disk_distortion(x, (4 * n + 5).max(64));
    let gate = tol * mean.abs().max(1.0);
    DiskCheck {
        is_disk: spread <= gate && dense <= gate,
        max_deviation: spread,
        dense_distortion: dense,
        mean_support: mean,
    }
}

/// One subdifferential generator `w g g*` at its angle.
#[derive(Debug, Clone)]
pub struct SubdiffGenerator {
    pub theta: f64,
    pub matrix: ComplexMatrix,
}

impl SubdiffGenerator {
    fn from_sample(s: &SupportSample) -> Self {
        let n = s.g.len();
        let matrix = ComplexMatrix::from_fn(n, |i, j| s.w * s.g[i] * s.g[j].conj());
        SubdiffGenerator {
            theta: s.theta,
            matrix,
        }
    }
}

/// Samples `m` subdifferential generators of `r` at a disk matrix, at
/// equispaced angles.  Refuses when `X` fails the disk test or when the
/// largest eigenvalue is not simple at some sampled angle (so `X` is
/// outside the `Omega` proxy), reporting the offending angle.
pub fn subdiff_sample(x: &ComplexMatrix, m: usize) -> Result<Vec<SubdiffGenerator>> {
    let check = is_disk_near(x, 1e-8);
    if !check.is_disk {
        return Err(Error::NotDiskMatrix {
            deviation: check.max_deviation.max(check.dense_distortion),
        });
    }
    let mut generators = Vec::with_capacity(m);
    for theta in sample_angles(m) {
        let s = support(x, theta);
        if s.gap <= 1e-10 {
            return Err(Error::NonsimpleEigenvalue { theta, gap: s.gap });
        }
        generators.push(SubdiffGenerator::from_sample(&s));
    }
    Ok(generators)
}

/// Rank of a set of real vectors via one-sided Jacobi singular values with
/// a relative tolerance.
fn real_rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    let cols: Vec<Vec<Complex64>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    let sigma = svd_columns(&cols).sigma;
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return 0;
    }
    sigma.iter().filter(|s| **s > tol * sigma_max).count()
}

/// Affine dimension of the sampled subdifferential: real-vectorize
/// `(1, Y_k)`, subtract the first row, and count singular values above
/// `tol * sigma_max`.
pub fn subdiff_dimension(x: &ComplexMatrix, m: usize, tol: f64) -> Result<usize> {
    let generators = subdiff_sample(x, m)?;
    let rows: Vec<Vec<f64>> = generators
        .iter()
        .map(|g| {
            let mut row = Vec::with_capacity(1 + 2 * x.n() * x.n());
            row.push(1.0);
            row.extend(g.matrix.vec_real());
            row
        })
        .collect();
    let diffs: Vec<Vec<f64>> = rows[1..]
        .iter()
        .map(|r| r.iter().zip(rows[0].iter()).map(|(a, b)| a - b).collect())
        .collect();
    Ok(real_rank(&diffs, tol))
}

/// Moment vector `f(w) = (w, w^2, ..., w^n)`.
pub fn moment_f(w: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        p *= w;
        out.push(p);
    }
    out
}

/// Moment matrix `F(w) = w f(w) f(w)*`; its (1,2) entry is identically 1
/// and its first column is `f(w)`.
pub fn moment_matrix(w: Complex64, n: usize) -> ComplexMatrix {
    let f = moment_f(w, n);
    ComplexMatrix::from_fn(n, |i, j| w * f[i] * f[j].conj())
}

/// Validates the affine independence of `{f(w_k)}` for at most `2n + 1`
/// distinct angles; linear independence of the lifted vectors `(1, f(w_k))`
/// is a theorem, so a `false` return signals a numerical problem rather
/// than interesting geometry.
pub fn moment_independence_check(angles: &[f64], n: usize) -> Result<bool> {
    if angles.len() > 2 * n + 1 {
        return Err(Error::InvalidInput(format!(
            "{} angles exceed 2n + 1 = {}",
            angles.len(),
            2 * n + 1
        )));
    }
    let ws: Vec<Complex64> = angles
        .iter()
        .map(|&t| Complex64::from_polar(1.0, t))
        .collect();
    for i in 0..ws.len() {
        for j in i + 1..ws.len() {
            if (ws[i] - ws[j]).norm() < 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "duplicate angles at positions {i} and {j}"
                )));
            }
        }
    }
    let vectors: Vec<Vec<f64>> = ws
        .iter()
        .map(|&w| {
            let mut v = vec![1.0];
            for z in moment_f(w, n) {
                v.push(z.re);
                v.push(z.im);
            }
            v
        })
        .collect();
    Ok(real_rank(&vectors, 1e-8) == vectors.len())
}

/// Numerical certificate for partial smoothness of `r` at `X` relative to
/// the disk matrices, for a candidate eigenvector matrix `G`.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothnessCertificate {
    pub n: usize,
    pub is_disk: bool,
    pub simple_on_circle: bool,
    pub eigvec_matches_gf: bool,
    /// `dim(X-perp intersect span{G F(w_k) G*})`; present only when the
    /// eigenvector hypothesis held.
    pub codimension: Option<usize>,
    /// Sampled affine dimension of the subdifferential.
    pub subdiff_dim: Option<usize>,
    /// Residuals backing the booleans.
    pub min_gap: f64,
    pub lambda_spread: f64,
    pub lambda_mean: f64,
    pub max_eigvec_sin: f64,
    pub span_rank_base: Option<usize>,
    pub span_rank_full: Option<usize>,
    /// True exactly when every hypothesis held and the codimension is `2n`.
    pub valid: bool,
}

/// Checks the partial-smoothness hypotheses at `m` angles: constant simple
/// largest eigenvalue with eigenvector parallel to `G f(w)`, and normal
/// space `X-perp intersect span{G F(w) G*}` of dimension `2n`.  The first
/// `2n + 1` angles must already span (their independence is a theorem);
/// the remaining angles validate that the rank does not grow.
pub fn certify_partial_smoothness(
    x: &ComplexMatrix,
    g: &ComplexMatrix,
    m: usize,
    tol: f64,
) -> Result<SmoothnessCertificate> {
    let n = x.n();
    if g.n() != n {
        return Err(Error::InvalidInput("G must match the order of X".into()));
    }
    let m = m.max(2 * n + 1);
    let gcols: Vec<Vec<Complex64>> = (0..n).map(|j| g.column(j)).collect();
    let gsvd = svd_columns(&gcols);
    let smin = gsvd.sigma.last().copied().unwrap_or(0.0);
    let smax = gsvd.sigma.first().copied().unwrap_or(0.0);
    if smin == 0.0 || smax / smin >= 1e12 {
        return Err(Error::Singular(format!(
            "G condition number {:.3e}",
            if smin == 0.0 { f64::INFINITY } else { smax / smin }
        )));
    }

    let disk = is_disk_near(x, tol);
    let angles = sample_angles(m);
    let samples: Vec<SupportSample> = angles.iter().map(|&t| support(x, t)).collect();
    let lambdas: Vec<f64> = samples.iter().map(|s| s.lambda).collect();
    let mean = lambdas.iter().sum::<f64>() / lambdas.len() as f64;
    let spread = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_gap = samples.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);
    let simple = min_gap > tol;

    let mut max_sin = 0.0_f64;
    let mut matches = false;
    let mut codimension = None;
    let mut span_rank_base = None;
    let mut span_rank_full = None;
    if simple {
        for s in &samples {
            let gf = g.matvec(&moment_f(s.w, n));
            let norm = crate::linalg::vec_norm(&gf);
            let unit: Vec<Complex64> = gf.iter().map(|z| z / norm).collect();
            // Sine of the angle as the norm of the orthogonal residual:
            // stable down to machine precision, unlike sqrt(1 - |<.,.>|^2).
            let overlap = vec_dot(&unit, &s.g);
            let resid: Vec<Complex64> = s
                .g
                .iter()
                .zip(unit.iter())
                .map(|(gi, ui)| gi - overlap * ui)
                .collect();
            max_sin = max_sin.max(crate::linalg::vec_norm(&resid));
        }
        matches = max_sin <= tol;
        if matches {
            let vecs: Vec<Vec<f64>> = samples
                .iter()
                .map(|s| {
                    let fw = moment_matrix(s.w, n);
                    (&(g * &fw) * &g.adjoint()).vec_real()
                })
                .collect();
            let base = real_rank(&vecs[..2 * n + 1], tol);
            let full = real_rank(&vecs, tol);
            span_rank_base = Some(base);
            span_rank_full = Some(full);
            if base == 2 * n + 1 && full == base {
                codimension = Some(intersection_with_x_perp(x, &vecs[..2 * n + 1], tol).len());
            }
        }
    }

    let subdiff_dim = if disk.is_disk && simple {
        subdiff_dimension(x, m, tol).ok()
    } else {
        None
    };

    let valid = disk.is_disk && simple && matches && codimension == Some(2 * n);
    Ok(SmoothnessCertificate {
        n,
        is_disk: disk.is_disk,
        simple_on_circle: simple,
        eigvec_matches_gf: matches,
        codimension,
        subdiff_dim,
        min_gap,
        lambda_spread: spread,
        lambda_mean: mean,
        max_eigvec_sin: max_sin,
        span_rank_base,
        span_rank_full,
        valid,
    })
}

/// Orthonormal basis (real inner product) of
/// `X-perp intersect span{vectors}`, each element returned as its real
/// coordinate vector.
fn intersection_with_x_perp(x: &ComplexMatrix, vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<Complex64>> = vectors
        .iter()
        .map(|v| v.iter().map(|&t| Complex64::new(t, 0.0)).collect())
        .collect();
    let svd = svd_columns(&cols);
    let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Vec::new();
    }
    // Orthonormal basis u_k of the span from the rotated columns.
    let dim = vectors[0].len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (k, sk) in svd.sigma.iter().enumerate() {
        if *sk <= tol * sigma_max {
            continue;
        }
        let mut u = vec![0.0; dim];
        for (j, col) in vectors.iter().enumerate() {
            let w = svd.v[k][j];
            // Input vectors are real; the rotation may introduce a global
            // phase, which fix_phase removed, so the weight is real too.
            for (ui, &cj) in u.iter_mut().zip(col.iter()) {
                *ui += w.re * cj;
            }
        }
        for ui in u.iter_mut() {
            *ui /= sk;
        }
        basis.push(u);
    }
    let xvec = x.vec_real();
    let coeffs: Vec<f64> = basis
        .iter()
        .map(|u| u.iter().zip(xvec.iter()).map(|(a, b)| a * b).sum())
        .collect();
    let cnorm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let xnorm = xvec.iter().map(|c| c * c).sum::<f64>().sqrt();
    if cnorm <= tol * xnorm.max(1.0) {
        // X orthogonal to the whole span: the intersection is the span.
        return basis;
    }
    // Householder complement of the coefficient vector: images of
    // e_2..e_s under the reflector sending c to a multiple of e_1.
    let s = basis.len();
    let mut v = coeffs.clone();
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign * cnorm;
    let vv: f64 = v.iter().map(|t| t * t).sum();
    let mut out = Vec::with_capacity(s - 1);
    for j in 1..s {
        // y = e_j - 2 v_j / (v'v) * v, expressed in the u-basis.
        let factor = 2.0 * v[j] / vv;
        let mut y = vec![0.0; s];
        y[j] = 1.0;
        for (yi, vi) in y.iter_mut().zip(v.iter()) {
            *yi -= factor * vi;
        }
        let mut vec_out = vec![0.0; basis[0].len()];
        for (coef, u) in y.iter().zip(basis.iter()) {
            for (oi, ui) in vec_out.iter_mut().zip(u.iter()) {
                *oi += coef * ui;
            }
        }
        out.push(vec_out);
    }
    out
}

/// Orthonormal basis of the certified normal space
/// `N(X) = X-perp intersect span{G F(w_k) G*}` at `2n + 1` base angles.
/// Requires a valid certificate.
pub fn normal_space_basis(
    x: &ComplexMatrix,
    g: &ComplexMatrix,
    m: usize,
    tol: f64,
) -> Result<Vec<ComplexMatrix>> {
    let n = x.n();
    let m = m.max(2 * n + 1);
    let cert = certify_partial_smoothness(x, g, m.max(4 * n + 3), tol)?;
    if !cert.valid {
        return Err(Error::InvalidInput(format!(
            "partial-smoothness certificate invalid: {cert:?}"
        )));
    }
    let vecs: Vec<Vec<f64>> = sample_angles(m)
        .iter()
        .map(|&t| {
            let w = Complex64::from_polar(1.0, t);
            let fw = moment_matrix(w, n);
            (&(g * &fw) * &g.adjoint()).vec_real()
        })
        .collect();
    Ok(intersection_with_x_perp(x, &vecs, tol)
        .into_iter()
        .map(|v| ComplexMatrix::from_vec_real(n, &v))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{
        crabb, e0, h_subgradient, jordan2, jordan3, superdiag_certifying_g, superdiag_from_sc,
    };
    use crate::radius::numerical_radius;
    use crate::rng::CounterRng;

    #[test]
    fn disk_check_examples() {
        let check = is_disk_near(&crabb(5).unwrap(), 1e-8);
        assert!(check.is_disk);
        assert!(check.max_deviation <= 1e-12);

        let mut perturbed = jordan2();
        perturbed[(0, 0)] += Complex64::new(0.1, 0.0);
        assert!(!is_disk_near(&perturbed, 1e-8).is_disk);

        assert!(is_disk_near(&ComplexMatrix::zeros(3), 1e-8).is_disk);
    }

    #[test]
    fn jordan2_generators_match_closed_form() {
        let gens = subdiff_sample(&jordan2(), 5).unwrap();
        assert_eq!(gens.len(), 5);
        for g in &gens {
            let w = Complex64::from_polar(1.0, g.theta);
            let expected = ComplexMatrix::from_fn(2, |i, j| {
                0.5 * match (i, j) {
                    (0, 0) => w,
                    (0, 1) => Complex64::new(1.0, 0.0),
                    (1, 0) => w * w,
                    (1, 1) => w,
                    _ => unreachable!(),
                }
            });
            assert!(g.matrix.sub(&expected).fro_norm() < 1e-10);
        }
    }

    #[test]
    fn jordan3_generators_match_closed_form() {
        let s2 = 2.0_f64.sqrt();
        let gens = subdiff_sample(&jordan3(), 7).unwrap();
        for g in &gens {
            let w = Complex64::from_polar(1.0, g.theta);
            let wi = w.conj();
            let rows = [
                [w, Complex64::new(s2, 0.0), wi],
                [s2 * w * w, 2.0 * w, Complex64::new(s2, 0.0)],
                [w * w * w, s2 * w * w, w],
            ];
            let expected = ComplexMatrix::from_fn(3, |i, j| 0.25 * rows[i][j]);
            assert!(g.matrix.sub(&expected).fro_norm() < 1e-10);
        }
    }

    #[test]
    fn scaled_e0_generators_match_closed_form() {
        let x = e0().scale_re(2.0);
        let gens = subdiff_sample(&x, 6).unwrap();
        for g in &gens {
            let w = Complex64::from_polar(1.0, g.theta);
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let rows = [
                [w, zero, one],
                [zero, zero, zero],
                [w * w, zero, w],
            ];
            let expected = ComplexMatrix::from_fn(3, |i, j| 0.5 * rows[i][j]);
            assert!(g.matrix.sub(&expected).fro_norm() < 1e-10);
        }
    }

    #[test]
    fn subdiff_sample_rejects_non_disks_and_nonsimple() {
        let mut rng = CounterRng::new(51, 0);
        let x = rng.complex_matrix(3);
        assert!(matches!(
            subdiff_sample(&x, 5),
            Err(Error::NotDiskMatrix { .. })
        ));
        // The zero matrix is a disk but its top eigenvalue is never simple.
        assert!(matches!(
            subdiff_sample(&ComplexMatrix::zeros(2), 5),
            Err(Error::NonsimpleEigenvalue { .. })
        ));
    }

    #[test]
    fn generators_are_subgradients() {
        let x = crabb(4).unwrap();
        let r = numerical_radius(&x, 128).value;
        let gens = subdiff_sample(&x, 9).unwrap();
        let mut rng = CounterRng::new(52, 0);
        for g in &gens {
            assert!((g.matrix.inner(&x) - r).abs() < 1e-9);
            let tr = g.matrix.trace();
            assert!((tr.norm() - 1.0).abs() < 1e-10, "trace modulus");
        }
        for _ in 0..100 {
            let z = rng.complex_matrix(4);
            let rz = numerical_radius(&z, 64).value;
            for g in &gens {
                assert!(g.matrix.inner(&z) <= rz + 1e-9);
            }
        }
    }

    #[test]
    fn h_is_a_subgradient_at_crabb() {
        let n = 5;
        let k = crabb(n).unwrap();
        let h = h_subgradient(n).unwrap();
        let mut rng = CounterRng::new(53, 0);
        for _ in 0..1000 {
            let z = rng.complex_matrix(n);
            let rz = numerical_radius(&z, 64).value;
            let lhs = h.inner(&z.sub(&k));
            assert!(lhs <= rz - 1.0 + 1e-8, "subgradient inequality: {lhs} vs {}", rz - 1.0);
        }
    }

    #[test]
    fn subdiff_dimensions() {
        assert_eq!(subdiff_dimension(&jordan2(), 11, 1e-8).unwrap(), 4);
        assert_eq!(subdiff_dimension(&jordan3(), 15, 1e-8).unwrap(), 6);
        // E==< representative: 2 [[0,0,b],[0,c,0],[0,0,0]] with 2|c| < |b|.
        let mut x = ComplexMatrix::zeros(3);
        x[(0, 2)] = Complex64::new(1.6, 0.4);
        x[(1, 1)] = Complex64::new(0.2, 0.3);
        assert_eq!(subdiff_dimension(&x, 15, 1e-8).unwrap(), 4);
    }

    #[test]
    fn subdiff_dimension_is_unitarily_invariant() {
        let mut rng = CounterRng::new(54, 0);
        let x = jordan3();
        let d0 = subdiff_dimension(&x, 15, 1e-8).unwrap();
        for _ in 0..3 {
            let u = rng.unitary(3);
            let y = &(&u.adjoint() * &x) * &u;
            assert_eq!(subdiff_dimension(&y, 15, 1e-8).unwrap(), d0);
        }
    }

    #[test]
    fn moment_examples() {
        let one = Complex64::new(1.0, 0.0);
        let f = moment_f(one, 2);
        assert_eq!(f, vec![one, one]);
        let fm = moment_matrix(one, 2);
        for i in 0..2 {
            for j in 0..2 {
                assert!((fm[(i, j)] - one).norm() < 1e-15);
            }
        }
        let i_unit = Complex64::new(0.0, 1.0);
        let f = moment_f(i_unit, 2);
        assert!((f[0] - i_unit).norm() < 1e-15);
        assert!((f[1] + one).norm() < 1e-15);

        let mut rng = CounterRng::new(55, 0);
        for n in 2..=6 {
            let w = rng.unit_complex();
            let fm = moment_matrix(w, n);
            assert!((fm[(0, 1)] - one).norm() < 1e-14, "entry (1,2) must be 1");
            let f = moment_f(w, n);
            for i in 0..n {
                assert!((fm[(i, 0)] - f[i]).norm() < 1e-14, "first column is f");
            }
        }
    }

    #[test]
    fn moment_independence_holds_on_random_draws() {
        let mut rng = CounterRng::new(56, 0);
        for n in 2..=6 {
            for _ in 0..200 {
                let count = 2 + (rng.next_u64() as usize) % (2 * n);
                let angles: Vec<f64> = (0..count)
                    .map(|_| 2.0 * std::f64::consts::PI * rng.uniform())
                    .collect();
                // Skip accidental near-duplicates; they are a precondition
                // violation, not a counterexample.
                match moment_independence_check(&angles, n) {
                    Ok(ok) => assert!(ok, "n={n}, angles={angles:?}"),
                    Err(Error::InvalidInput(_)) => continue,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(moment_independence_check(&[0.3, 0.3], 3).is_err());
        assert!(moment_independence_check(&sample_angles(7), 3).unwrap());
    }

    #[test]
    fn certify_jordan2_with_identity() {
        let cert =
            certify_partial_smoothness(&jordan2(), &ComplexMatrix::identity(2), 11, 1e-8).unwrap();
        assert!(cert.valid, "{cert:?}");
        assert_eq!(cert.codimension, Some(4));
        assert_eq!(cert.subdiff_dim, Some(4));
    }

    #[test]
    fn certify_superdiagonal_with_recursion_g() {
        let s = [0.6, 0.35];
        let c: Vec<f64> = s.iter().map(|x: &f64| (1.0 - x * x).sqrt()).collect();
        let x = superdiag_from_sc(&s, &c).unwrap();
        let g = superdiag_certifying_g(&s, &c);
        let cert = certify_partial_smoothness(&x, &g, 19, 1e-8).unwrap();
        assert!(cert.valid, "{cert:?}");
        assert_eq!(cert.codimension, Some(8));
    }

    #[test]
    fn certify_fails_at_scaled_e0_and_succeeds_nowhere_improper() {
        let x = e0().scale_re(2.0);
        let cert =
            certify_partial_smoothness(&x, &ComplexMatrix::identity(3), 15, 1e-8).unwrap();
        assert!(!cert.valid);
        assert!(cert.is_disk && cert.simple_on_circle);
        assert!(!cert.eigvec_matches_gf, "sin = {:.3e}", cert.max_eigvec_sin);

        let singular = ComplexMatrix::zeros(2);
        assert!(matches!(
            certify_partial_smoothness(&jordan2(), &singular, 11, 1e-8),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn normal_space_at_jordan2() {
        let basis = normal_space_basis(&jordan2(), &ComplexMatrix::identity(2), 5, 1e-8).unwrap();
        assert_eq!(basis.len(), 4);
        for (i, b) in basis.iter().enumerate() {
            assert!(b.inner(&jordan2()).abs() < 1e-9, "basis {i} not in X-perp");
            for (j, b2) in basis.iter().enumerate() {
                let ip = b.inner(b2);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn normal_space_dimension_is_2n_for_superdiagonals() {
        for n in [3usize, 4] {
            let s: Vec<f64> = (0..n - 2).map(|k| 0.4 + 0.1 * k as f64).collect();
            let c: Vec<f64> = s.iter().map(|x: &f64| (1.0 - x * x).sqrt()).collect();
            let x = superdiag_from_sc(&s, &c).unwrap();
            let g = superdiag_certifying_g(&s, &c);
            let basis = normal_space_basis(&x, &g, 2 * n + 1, 1e-8).unwrap();
            assert_eq!(basis.len(), 2 * n);
        }
    }

    #[test]
    fn normal_space_is_orthogonal_to_manifold_curves() {
        // Finite-difference tangents of curves rho(t) U(t) X U(t)* that stay
        // inside the disk matrices.
        let s = [0.5];
        let c = [(1.0_f64 - 0.25).sqrt()];
        let x = superdiag_from_sc(&s, &c).unwrap();
        let g = superdiag_certifying_g(&s, &c);
        let basis = normal_space_basis(&x, &g, 7, 1e-8).unwrap();
        let mut rng = CounterRng::new(57, 0);
        let h = 1e-5;
        for _ in 0..5 {
            let a = rng.complex_matrix(3);
            let k = a.sub(&a.adjoint()).scale_re(0.5);
            let rho_dot = rng.normal();
            let curve = |t: f64| {
                let tk = k.scale_re(t);
                let tk2 = (&tk * &tk).scale_re(0.5);
                let tk3 = (&(&tk * &tk) * &tk).scale_re(1.0 / 6.0);
                let u = ComplexMatrix::identity(3)
                    .add_mat(&tk)
                    .add_mat(&tk2)
                    .add_mat(&tk3);
                (&(&u * &x) * &u.adjoint()).scale_re(1.0 + rho_dot * t)
            };
            let tangent = curve(h).sub(&curve(-h)).scale_re(1.0 / (2.0 * h));
            for b in &basis {
                let ip = b.inner(&tangent).abs();
                assert!(
                    ip <= 1e-7 * tangent.fro_norm().max(1.0),
                    "normal/tangent overlap {ip:.3e}"
                );
            }
        }
    }
}
