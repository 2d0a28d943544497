//! Exact 3x3 theory: reduction to the canonical `[[0, S], [0, 0]]` form,
//! the compatibility condition `c (|a|^2 + |d|^2) = -a d conj(b)`, the
//! class partition, and the closed-form radius and eigenvectors.
//!
//! Every 3x3 disk matrix is unitarily similar to
//!
//! ```text
//! [ 0  2a  2b ]
//! [ 0  2c  2d ]
//! [ 0   0   0 ]
//! ```
//!
//! with the condition above; the classes split on whether `a`, `d` vanish
//! and on `2|c|` versus `|b|`.  Disk matrices are exactly the classes with
//! `2|c| <= |b|` when `a = d = 0`, plus the generic class with `a, d != 0`;
//! partial smoothness holds exactly on the latter.

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{kernel_basis, vec_dot, vec_norm, ComplexMatrix};
use crate::rng::CounterRng;
use crate::{Error, Result};

/// Unitary reduction of a 3x3 matrix to the canonical form.
#[derive(Debug, Clone)]
pub struct Schur3Form {
    /// Columns are the reducing basis `(v1, v2, v3)`.
    pub u: ComplexMatrix,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    /// Norm of the entries of `U* X U` that the form requires to vanish.
    pub residual: f64,
}

/// Class labels for the canonical-form parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiskClass3 {
    /// `a != 0, d != 0`: disk matrix, partial-smoothness point.
    NeNe,
    /// `a = d = 0, 2|c| < |b|` (or the nilpotent folds): disk matrix, not
    /// partly smooth.
    EqLt,
    /// `a = d = 0, 2|c| = |b|`: disk matrix, nonsimple on the circle.
    EqEq,
    /// `a = d = 0, 2|c| > |b|`: in the cone but not a disk matrix.
    EqGt,
    /// No canonical form or the compatibility condition fails.
    NotInE,
}

/// Classification result with the margins the decision rests on.
#[derive(Debug, Clone)]
pub struct XiClass {
    pub label: DiskClass3,
    pub is_disk: bool,
    /// Decision quantities for the normalized matrix (`||X||_F = 1`).
    pub abs_a: f64,
    pub abs_d: f64,
    pub two_c_minus_b: f64,
    pub abcd_residual: f64,
    /// Numerical radius from the closed form, at the original scale; set
    /// for the disk classes.
    pub radius: Option<f64>,
    pub form: Option<Schur3Form>,
}

/// Assembles the canonical-form matrix from its parameters.
pub fn assemble_form(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3);
    m[(0, 1)] = 2.0 * a;
    m[(0, 2)] = 2.0 * b;
    m[(1, 1)] = 2.0 * c;
    m[(1, 2)] = 2.0 * d;
    m
}

/// `|c (|a|^2 + |d|^2) + a d conj(b)|`, the defect of the compatibility
/// condition.
pub fn abcd_residual(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    (c * (a.norm_sqr() + d.norm_sqr()) + a * d * b.conj()).norm()
}

/// Unit vector in the span of orthonormal `basis` maximizing `||op v||`,
/// where `images[i] = op(basis[i])`; falls back to the first basis vector
/// when the operator annihilates the whole span.
fn strongest_combination(
    basis: &[Vec<Complex64>],
    images: &[Vec<Complex64>],
    floor: f64,
) -> Vec<Complex64> {
    if basis.len() == 1 {
        return basis[0].clone();
    }
    let svd = crate::linalg::svd_columns(images);
    if svd.sigma[0] <= floor {
        return basis[0].clone();
    }
    let coeff = &svd.v[0];
    let dim = basis[0].len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (c, b) in coeff.iter().zip(basis.iter()) {
        for (oi, bi) in out.iter_mut().zip(b.iter()) {
            *oi += c * bi;
        }
    }
    out
}

/// Reduces a 3x3 matrix to the canonical form by finding a unit kernel
/// vector of `X` and one of `X*` orthogonal to it.  Failure to find such a
/// pair is itself the verdict that no canonical form exists.
///
/// The residual unitary freedom in multidimensional kernels is fixed
/// deterministically: `v1` maximizes `||X* v||` over `ker X` and `v3`
/// maximizes `||X v||` over `ker(X*)` intersected with `v1`-perp, which
/// keeps matrices already in canonical form fixed.
pub fn schur_disk_form(x: &ComplexMatrix, tol: f64) -> Result<Schur3Form> {
    if x.n() != 3 {
        return Err(Error::InvalidInput("schur_disk_form needs a 3x3 matrix".into()));
    }
    let right = kernel_basis(x, tol);
    let left = kernel_basis(&x.adjoint(), tol);
    if right.is_empty() || left.is_empty() {
        return Err(Error::InvalidInput("no kernel pair".into()));
    }
    let floor = 1e-12 * x.fro_norm().max(1.0);
    let adj = x.adjoint();
    let right_images: Vec<Vec<Complex64>> = right.iter().map(|v| adj.matvec(v)).collect();
    let v1 = strongest_combination(&right, &right_images, floor);

    // Basis of ker(X*) orthogonal to v1, expressed through a Householder
    // complement of the overlap coefficients (so it stays inside the
    // kernel exactly).
    let overlaps: Vec<Complex64> = left.iter().map(|l| vec_dot(&v1, l)).collect();
    let overlap_norm = overlaps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let admissible: Vec<Vec<Complex64>> = if overlap_norm <= 1e-9 {
        left.clone()
    } else if left.len() == 1 {
        return Err(Error::InvalidInput("kernels are not orthogonal".into()));
    } else {
        let r = left.len();
        // Coefficients must satisfy sum coeff_i <v1, l_i> = 0, i.e. be
        // Hermitian-orthogonal to the conjugated overlaps.
        let conj_overlaps: Vec<Complex64> = overlaps.iter().map(|z| z.conj()).collect();
        let phase = if conj_overlaps[0].norm() > 0.0 {
            conj_overlaps[0] / conj_overlaps[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut hh = conj_overlaps;
        hh[0] += phase * overlap_norm;
        let hh_sq: f64 = hh.iter().map(|z| z.norm_sqr()).sum();
        (1..r)
            .map(|j| {
                // Column j of the Householder reflector, mapped through the
                // kernel basis.
                let factor = 2.0 * hh[j].conj() / hh_sq;
                let mut out = vec![Complex64::new(0.0, 0.0); 3];
                for (i, l) in left.iter().enumerate() {
                    let coeff = if i == j {
                        Complex64::new(1.0, 0.0) - factor * hh[i]
                    } else {
                        -factor * hh[i]
                    };
                    for (oi, li) in out.iter_mut().zip(l.iter()) {
                        *oi += coeff * li;
                    }
                }
                out
            })
            .collect()
    };
    let admissible_images: Vec<Vec<Complex64>> = admissible.iter().map(|v| x.matvec(v)).collect();
    let v3 = strongest_combination(&admissible, &admissible_images, floor);
    let v3norm = vec_norm(&v3);
    let v3: Vec<Complex64> = v3.iter().map(|z| z / v3norm).collect();

    // Complete to a unitary basis.
    let mut v2 = None;
    for i in 0..3 {
        let mut e = vec![Complex64::new(0.0, 0.0); 3];
        e[i] = Complex64::new(1.0, 0.0);
        let c1 = vec_dot(&v1, &e);
        let c3 = vec_dot(&v3, &e);
        let w: Vec<Complex64> = (0..3).map(|k| e[k] - c1 * v1[k] - c3 * v3[k]).collect();
        let norm = vec_norm(&w);
        if norm > 0.1 {
            v2 = Some(w.iter().map(|z| z / norm).collect::<Vec<_>>());
            break;
        }
    }
    let v2 = v2.expect("standard basis spans the complement");

    let u = ComplexMatrix::from_fn(3, |i, j| match j {
        0 => v1[i],
        1 => v2[i],
        _ => v3[i],
    });
    let m = &(&u.adjoint() * x) * &u;
    let residual = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2)]
        .iter()
        .map(|&(i, j)| m[(i, j)].norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(Schur3Form {
        u,
        a: m[(0, 1)] / 2.0,
        b: m[(0, 2)] / 2.0,
        c: m[(1, 1)] / 2.0,
        d: m[(1, 2)] / 2.0,
        residual,
    })
}

/// Classifies a 3x3 matrix into the disk-matrix partition.
///
/// The matrix is first normalized to unit Frobenius norm, so labels are
/// scale invariant; the zero matrix is a disk of radius 0 and lands in the
/// degenerate equal class.  Nilpotent members with exactly one of `a, d`
/// zero fold into the `EqLt` class through the rank-one reduction.
pub fn classify(x: &ComplexMatrix, tol: f64) -> Result<XiClass> {
    if x.n() != 3 {
        return Err(Error::InvalidInput("classify needs a 3x3 matrix".into()));
    }
    let scale = x.fro_norm();
    if scale == 0.0 {
        return Ok(XiClass {
            label: DiskClass3::EqEq,
            is_disk: true,
            abs_a: 0.0,
            abs_d: 0.0,
            two_c_minus_b: 0.0,
            abcd_residual: 0.0,
            radius: Some(0.0),
            form: None,
        });
    }
    let xn = x.scale_re(1.0 / scale);
    let not_in_e = |res: f64| XiClass {
        label: DiskClass3::NotInE,
        is_disk: false,
        abs_a: f64::NAN,
        abs_d: f64::NAN,
        two_c_minus_b: f64::NAN,
        abcd_residual: res,
        radius: None,
        form: None,
    };
    let form = match schur_disk_form(&xn, 1e-8) {
        Ok(f) => f,
        Err(_) => return Ok(not_in_e(f64::NAN)),
    };
    if form.residual > 1e-6 {
        return Ok(not_in_e(f64::NAN));
    }
    let (a, b, c, d) = (form.a, form.b, form.c, form.d);
    let res = abcd_residual(a, b, c, d);
    if res > tol {
        let mut out = not_in_e(res);
        out.form = Some(form);
        return Ok(out);
    }

    let (abs_a, abs_d) = (a.norm(), d.norm());
    let radius_normalized = (a.norm_sqr() + d.norm_sqr() + b.norm_sqr()).sqrt();
    let mut margins_b = b.norm();
    let mut margins_c = c.norm();
    let label = if abs_a > tol && abs_d > tol {
        DiskClass3::NeNe
    } else if abs_a > tol || abs_d > tol {
        // Nilpotent fold: one of a, d vanishes, forcing c = 0; the matrix
        // is unitarily similar to a rank-one member of the strict class.
        margins_b = if abs_a <= tol {
            (b.norm_sqr() + d.norm_sqr()).sqrt()
        } else {
            (a.norm_sqr() + b.norm_sqr()).sqrt()
        };
        margins_c = 0.0;
        DiskClass3::EqLt
    } else {
        let gap = 2.0 * c.norm() - b.norm();
        if gap.abs() <= tol {
            DiskClass3::EqEq
        } else if gap < 0.0 {
            DiskClass3::EqLt
        } else {
            DiskClass3::EqGt
        }
    };
    let is_disk = matches!(
        label,
        DiskClass3::NeNe | DiskClass3::EqLt | DiskClass3::EqEq
    );
    Ok(XiClass {
        label,
        is_disk,
        abs_a,
        abs_d,
        two_c_minus_b: 2.0 * margins_c - margins_b,
        abcd_residual: res,
        radius: is_disk.then_some(scale * radius_normalized),
        form: Some(form),
    })
}

/// Closed-form radius `sqrt(|a|^2 + |d|^2 + |b|^2)` of a canonical-form
/// disk matrix; errors when the parameters fall in the non-disk class.
pub fn disk_radius3(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<f64> {
    let scale = [a, b, c, d]
        .iter()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    if abcd_residual(a, b, c, d) > 1e-6 * scale.powi(3) {
        return Err(Error::InvalidInput(
            "parameters violate the compatibility condition".into(),
        ));
    }
    if a.norm() <= 1e-9 * scale && d.norm() <= 1e-9 * scale && 2.0 * c.norm() > b.norm() + 1e-9 * scale {
        return Err(Error::InvalidInput(
            "parameters lie in the non-disk class".into(),
        ));
    }
    Ok((a.norm_sqr() + d.norm_sqr() + b.norm_sqr()).sqrt())
}

/// Closed-form unit top eigenvector of `Phi(w* E)` for normalized
/// parameters (`|a|^2 + |d|^2 + |b|^2 = 1`, `a, d` not both zero):
/// `(conj(w) a + b conj(d), 1 - |b|^2, conj(b) a + w conj(d))` scaled by
/// `1 / sqrt(2 (1 - |b|^2) (1 - 2 <w, c>))`.
pub fn eigvec3(a: Complex64, b: Complex64, d: Complex64, w: Complex64) -> Result<Vec<Complex64>> {
    let norm_sq = a.norm_sqr() + d.norm_sqr() + b.norm_sqr();
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "parameters must be normalized, |a|^2+|d|^2+|b|^2 = {norm_sq}"
        )));
    }
    if a.norm() <= 1e-9 && d.norm() <= 1e-9 {
        return Err(Error::InvalidInput("a and d must not both vanish".into()));
    }
    let c = -a * d * b.conj() / (a.norm_sqr() + d.norm_sqr());
    let wc = (w.conj() * c).re;
    let denom = 2.0 * (1.0 - b.norm_sqr()) * (1.0 - 2.0 * wc);
    let inv = 1.0 / denom.sqrt();
    Ok(vec![
        inv * (w.conj() * a + b * d.conj()),
        inv * Complex64::new(1.0 - b.norm_sqr(), 0.0),
        inv * (b.conj() * a + w * d.conj()),
    ])
}

/// Evaluates the closed-form characteristic polynomial of `Phi(w* E)`,
/// `-x^3 + 2 x^2 <w,c> + (|a|^2+|d|^2+|b|^2) x + 2 <w, a d conj(b) - c |b|^2>`,
/// alongside the direct determinant `det(Phi(w* E) - x I)`.
pub fn charpoly3_check(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    w: Complex64,
    lambda: f64,
) -> (f64, f64) {
    let wc = (w.conj() * c).re;
    let tail = (w.conj() * (a * d * b.conj() - c * b.norm_sqr())).re;
    let formula = -lambda.powi(3)
        + 2.0 * lambda * lambda * wc
        + (a.norm_sqr() + d.norm_sqr() + b.norm_sqr()) * lambda
        + 2.0 * tail;

    let e = assemble_form(a, b, c, d);
    let phi = e.scale(w.conj()).hermitian_part();
    let mut m = phi.as_matrix().clone();
    for i in 0..3 {
        m[(i, i)] -= Complex64::new(lambda, 0.0);
    }
    let det = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
    (formula, det.re)
}

/// Random canonical-form parameters for a class, normalized to radius 1.
pub fn sample_abcd(class: DiskClass3, rng: &mut CounterRng) -> (Complex64, Complex64, Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    match class {
        DiskClass3::NeNe => {
            let a = rng.unit_complex() * (0.35 + 0.55 * rng.uniform());
            let d = rng.unit_complex() * (0.35 + 0.55 * rng.uniform());
            let b = rng.unit_complex() * (0.1 + 0.75 * rng.uniform());
            let c = -a * d * b.conj() / (a.norm_sqr() + d.norm_sqr());
            let r = (a.norm_sqr() + d.norm_sqr() + b.norm_sqr()).sqrt();
            (a / r, b / r, c / r, d / r)
        }
        DiskClass3::EqLt => {
            let b = rng.unit_complex();
            let c = rng.unit_complex() * (0.475 * rng.uniform() * b.norm());
            (zero, b, c, zero)
        }
        DiskClass3::EqEq => {
            let b = rng.unit_complex();
            let c = rng.unit_complex() * (0.5 * b.norm());
            (zero, b, c, zero)
        }
        DiskClass3::EqGt => {
            let b = rng.unit_complex() * 0.6;
            let c = rng.unit_complex() * (0.5 * b.norm() * (1.1 + 1.5 * rng.uniform()));
            (zero, b, c, zero)
        }
        DiskClass3::NotInE => panic!("NotInE has no canonical parameters"),
    }
}

/// Hides a matrix behind a random unitary similarity and positive scale;
/// class labels are invariant to both.
pub fn random_disguise(x: &ComplexMatrix, rng: &mut CounterRng) -> ComplexMatrix {
    let u = rng.unitary(x.n());
    let scale = 0.5 + 1.5 * rng.uniform();
    (&(&u.adjoint() * x) * &u).scale_re(scale)
}
