//! The matrix families used throughout: Jordan blocks scaled to the unit
//! disk, the Crabb matrix, E0, the subgradient H, general superdiagonal
//! matrices with their normalization recursion, the Crouzeix
//! parametrization `X = 2 sin(B) U cos(B)` with its singular-pencil check,
//! and the two 3x3 families Y(xi), Z(phi, psi).

use num_complex::Complex64;

use crate::linalg::{kernel_basis, svd_columns, vec_norm, ComplexMatrix};
use crate::radius::{numerical_radius, DEFAULT_GRID};
use crate::{Error, Result};

fn superdiag_matrix(entries: &[Complex64]) -> ComplexMatrix {
    let n = entries.len() + 1;
    let mut m = ComplexMatrix::zeros(n);
    for (j, &a) in entries.iter().enumerate() {
        m[(j, j + 1)] = a;
    }
    m
}

/// 2x2 Jordan block scaled so its field of values is the unit disk.
pub fn jordan2() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]])
}

/// 3x3 Jordan block scaled to the unit disk: superdiagonal `(sqrt(2), sqrt(2))`.
pub fn jordan3() -> ComplexMatrix {
    let s = 2.0_f64.sqrt();
    superdiag_matrix(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)])
}

/// Crabb matrix: superdiagonal `(sqrt(2), 1, ..., 1, sqrt(2))`; field of
/// values the unit disk, and the extremal case of the bound
/// `r(X)^{n-1} / ||X^{n-1}|| >= 1/2`.
pub fn crabb(n: usize) -> Result<ComplexMatrix> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("crabb needs n >= 3, got {n}")));
    }
    let s = 2.0_f64.sqrt();
    let mut entries = vec![Complex64::new(1.0, 0.0); n - 1];
    entries[0] = Complex64::new(s, 0.0);
    entries[n - 2] = Complex64::new(s, 0.0);
    Ok(superdiag_matrix(&entries))
}

/// The rank-one disk matrix `E0 = e1 e3*` (radius 1/2).
pub fn e0() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3);
    m[(0, 2)] = Complex64::new(1.0, 0.0);
    m
}

/// The interior subgradient of `r` at the Crabb matrix:
/// `(1/(n-1)) * superdiag(1/sqrt(2), 1, ..., 1, 1/sqrt(2))`.
pub fn h_subgradient(n: usize) -> Result<ComplexMatrix> {
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "h_subgradient needs n >= 3, got {n}"
        )));
    }
    let inv_s = 1.0 / 2.0_f64.sqrt();
    let mut entries = vec![Complex64::new(1.0, 0.0); n - 1];
    entries[0] = Complex64::new(inv_s, 0.0);
    entries[n - 2] = Complex64::new(inv_s, 0.0);
    Ok(superdiag_matrix(&entries).scale_re(1.0 / (n as f64 - 1.0)))
}

/// Superdiagonal entries of a general nonzero superdiagonal matrix.
#[derive(Debug, Clone)]
pub struct SuperdiagSpec {
    pub entries: Vec<Complex64>,
}

impl SuperdiagSpec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("superdiagonal must be nonempty".into()));
        }
        if entries.iter().any(|a| a.norm() == 0.0) {
            return Err(Error::InvalidInput(
                "superdiagonal entries must be nonzero".into(),
            ));
        }
        Ok(SuperdiagSpec { entries })
    }

    pub fn matrix(&self) -> ComplexMatrix {
        superdiag_matrix(&self.entries)
    }
}

/// Unit-disk superdiagonal matrix `2 * superdiag(s0 c1, s1 c2, ..., s_{n-2} c_{n-1})`
/// built from interior sine/cosine pairs; `s` and `c` carry the interior
/// values `s_1..s_{n-2}`, `c_1..c_{n-2}` (empty for n = 2), with
/// `s_0 = 1 = c_{n-1}` fixed.
pub fn superdiag_from_sc(s: &[f64], c: &[f64]) -> Result<ComplexMatrix> {
    if s.len() != c.len() {
        return Err(Error::InvalidInput("s and c must have equal length".into()));
    }
    for (j, (&sj, &cj)) in s.iter().zip(c.iter()).enumerate() {
        if !(0.0 < sj && sj < 1.0 && 0.0 < cj && cj < 1.0) {
            return Err(Error::InvalidInput(format!(
                "s[{j}], c[{j}] must lie in (0,1)"
            )));
        }
        if (sj * sj + cj * cj - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "s[{j}]^2 + c[{j}]^2 must equal 1"
            )));
        }
    }
    let n = s.len() + 2;
    let full_s: Vec<f64> = std::iter::once(1.0).chain(s.iter().copied()).collect();
    let full_c: Vec<f64> = c.iter().copied().chain(std::iter::once(1.0)).collect();
    let entries: Vec<Complex64> = (0..n - 1)
        .map(|j| Complex64::new(2.0 * full_s[j] * full_c[j], 0.0))
        .collect();
    Ok(superdiag_matrix(&entries))
}

/// Diagonal certifying matrix for a superdiagonal unit-disk matrix:
/// `g_1 = 1`, `g_{j+1} = (s_{j-1} / c_j) g_j` with `s_0 = 1 = c_{n-1}`.
pub fn superdiag_certifying_g(s: &[f64], c: &[f64]) -> ComplexMatrix {
    let n = s.len() + 2;
    let full_s: Vec<f64> = std::iter::once(1.0).chain(s.iter().copied()).collect();
    let full_c: Vec<f64> = c.iter().copied().chain(std::iter::once(1.0)).collect();
    let mut g = vec![1.0; n];
    for j in 1..n {
        g[j] = g[j - 1] * full_s[j - 1] / full_c[j - 1];
    }
    ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::new(g[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Result of normalizing a superdiagonal matrix to the unit-disk form.
#[derive(Debug, Clone)]
pub struct SuperdiagNormalization {
    /// Interior sines `s_1..s_{n-2}`.
    pub s: Vec<f64>,
    /// Interior cosines `c_1..c_{n-2}`.
    pub c: Vec<f64>,
    /// Positive scale with `conj(D) A D = scale * superdiag_from_sc(s, c)`.
    pub scale: f64,
    /// Diagonal unitary phases `d_1..d_n` removing the arguments of the
    /// superdiagonal entries.
    pub phases: Vec<Complex64>,
}

/// Evaluates the recursion `h_1(t) = b_1 t`,
/// `h_{j+1}(t) = b_{j+1} t / (1 - h_j(t))` at `t`, returning `None` when `t`
/// escapes the domain (some intermediate `h_k >= 1`).
pub fn h_recursion(b: &[f64], j: usize, t: f64) -> Option<f64> {
    debug_assert!(j >= 1 && j <= b.len());
    let mut h = b[0] * t;
    for step in 1..j {
        if h >= 1.0 {
            return None;
        }
        h = b[step] * t / (1.0 - h);
    }
    Some(h)
}

/// Solves `h_j(t) = 1` on `(0, hi)` by bisection (200 iterations); the
/// bracket is guaranteed because each `h_j` increases from 0 to infinity on
/// its domain.
fn bisect_h(b: &[f64], j: usize, hi: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match h_recursion(b, j, mid) {
            Some(h) if h < 1.0 => lo = mid,
            _ => hi = mid,
        }
    }
    0.5 * (lo + hi)
}

/// Normalizes a nonzero superdiagonal: finds `(s, c)` with
/// `s_j^2 + c_j^2 = 1`, a positive `scale`, and diagonal unitary phases so
/// that the phase-conjugated input equals `scale * superdiag_from_sc(s, c)`.
///
/// The cosines come from the strictly increasing recursion
/// `h_{j+1}(t) = b_{j+1} t / (1 - h_j(t))` with `b_j = |a_j|^2`: the unique
/// `t_n` with `h_{n-1}(t_n) = 1` yields `c_j^2 = h_j(t_n)`.
pub fn superdiag_normalize(spec: &SuperdiagSpec) -> SuperdiagNormalization {
    let a = &spec.entries;
    let n = a.len() + 1;
    let b: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();

    // t_2 = 1/b_1 solves h_1 = 1; then t_{j+1} in (0, t_j) by bisection.
    let mut t = 1.0 / b[0];
    for j in 2..n {
        t = bisect_h(&b, j, t);
    }
    let t_n = t;

    let c_sq: Vec<f64> = (1..n)
        .map(|j| h_recursion(&b, j, t_n).expect("t_n inside the recursion domain"))
        .collect();
    let interior_c: Vec<f64> = c_sq[..n - 2].iter().map(|&x| x.sqrt()).collect();
    let interior_s: Vec<f64> = c_sq[..n - 2].iter().map(|&x| (1.0 - x).max(0.0).sqrt()).collect();
    let scale = 1.0 / (2.0 * t_n.sqrt());

    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    for j in 0..n - 1 {
        phases[j + 1] = phases[j] * a[j].conj() / a[j].norm();
    }

    SuperdiagNormalization {
        s: interior_s,
        c: interior_c,
        scale,
        phases,
    }
}

/// Parameters of the disk-matrix parametrization `X = 2 sin(B) U cos(B)`
/// with `B = diag(theta)`, `0 <= theta_j <= pi/2`, and `U` unitary.
#[derive(Debug, Clone)]
pub struct CrouzeixParams {
    pub theta: Vec<f64>,
    pub u: ComplexMatrix,
}

impl CrouzeixParams {
    pub fn new(theta: Vec<f64>, u: ComplexMatrix) -> Result<Self> {
        if theta.len() != u.n() {
            return Err(Error::InvalidInput(
                "theta length must match the unitary order".into(),
            ));
        }
        if theta
            .iter()
            .any(|&t| !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&t))
        {
            return Err(Error::InvalidInput(
                "theta entries must lie in [0, pi/2]".into(),
            ));
        }
        let n = u.n();
        let unit_err = (&u.adjoint() * &u).sub(&ComplexMatrix::identity(n)).fro_norm();
        if unit_err > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "U is not unitary (||U*U - I|| = {unit_err:.3e})"
            )));
        }
        Ok(CrouzeixParams { theta, u })
    }

    fn sin_b(&self) -> ComplexMatrix {
        diag_real(&self.theta.iter().map(|t| t.sin()).collect::<Vec<_>>())
    }

    fn cos_b(&self) -> ComplexMatrix {
        diag_real(&self.theta.iter().map(|t| t.cos()).collect::<Vec<_>>())
    }

    /// Pencil `U cos(B) - w sin(B)`.
    pub fn pencil(&self, w: Complex64) -> ComplexMatrix {
        (&self.u * &self.cos_b()).sub(&self.sin_b().scale(w))
    }
}

fn diag_real(d: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d.len(), |i, j| {
        if i == j {
            Complex64::new(d[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Outcome of building `X = 2 sin(B) U cos(B)` and checking the pencil.
#[derive(Debug, Clone)]
pub struct CrouzeixBuild {
    pub matrix: ComplexMatrix,
    /// True when `U cos(B) - w sin(B)` is singular at every sampled angle,
    /// which characterizes field of values equal to the unit disk.
    pub pencil_valid: bool,
    /// Largest `sigma_min` of the pencil over the angle grid; the residual
    /// backing `pencil_valid`.
    pub pencil_sigma: f64,
}

/// Builds the parametrized matrix and tests pencil singularity on `grid`
/// angles.  The pencil determinant is a trigonometric polynomial of degree
/// at most 2n, so 64 angles are decisive for n <= 16; validity is reported,
/// never thrown.
pub fn crouzeix_build(p: &CrouzeixParams, grid: usize) -> CrouzeixBuild {
    let grid = grid.max(2 * p.u.n() + 1);
    let x = &(&p.sin_b().scale_re(2.0) * &p.u) * &p.cos_b();
    let mut worst = 0.0_f64;
    for k in 0..grid {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / grid as f64);
        let pencil = p.pencil(w);
        let cols: Vec<Vec<Complex64>> = (0..pencil.n()).map(|j| pencil.column(j)).collect();
        let sigma = svd_columns(&cols).sigma;
        let sigma_min = sigma.last().copied().unwrap_or(0.0);
        worst = worst.max(sigma_min);
    }
    CrouzeixBuild {
        matrix: x,
        pencil_valid: worst <= 1e-8,
        pencil_sigma: worst,
    }
}

/// The block parameters producing the superdiagonal family: `U` holds the
/// shift structure, `B = diag(pi/2, theta_interior, 0)`.
pub fn superdiag_crouzeix_params(theta_interior: &[f64]) -> Result<CrouzeixParams> {
    let n = theta_interior.len() + 2;
    if theta_interior
        .iter()
        .any(|&t| !(0.0 < t && t < std::f64::consts::FRAC_PI_2))
    {
        return Err(Error::InvalidInput(
            "interior angles must lie strictly inside (0, pi/2)".into(),
        ));
    }
    let mut u = ComplexMatrix::zeros(n);
    // First row shifts into the interior block, the interior block is a
    // Jordan shift, and the corners close the cycle.
    for j in 0..n - 1 {
        u[(j, j + 1)] = Complex64::new(1.0, 0.0);
    }
    u[(n - 1, 0)] = Complex64::new(1.0, 0.0);
    let mut theta = Vec::with_capacity(n);
    theta.push(std::f64::consts::FRAC_PI_2);
    theta.extend_from_slice(theta_interior);
    theta.push(0.0);
    CrouzeixParams::new(theta, u)
}

/// Residual `||Phi(w* X) v - v|| / ||v||` for `v` spanning the pencil
/// kernel, after normalizing `r(X) = 1`; the pencil nullspace must be the
/// top eigenspace of `Phi(w* X)`.
pub fn null_eigvec_crosscheck(p: &CrouzeixParams, w: Complex64) -> Result<f64> {
    let build = crouzeix_build(p, 64);
    if !build.pencil_valid {
        return Err(Error::InvalidInput(
            "pencil is not singular on the circle".into(),
        ));
    }
    let kernel = kernel_basis(&p.pencil(w), 1e-8);
    let v = kernel
        .first()
        .ok_or_else(|| Error::Singular("pencil kernel is empty at this angle".into()))?;
    let r = numerical_radius(&build.matrix, DEFAULT_GRID).value;
    let x = build.matrix.scale_re(1.0 / r);
    let phi = x.scale(w.conj()).hermitian_part();
    let mut resid = phi.as_matrix().matvec(v);
    for (ri, vi) in resid.iter_mut().zip(v.iter()) {
        *ri -= vi;
    }
    Ok(vec_norm(&resid) / vec_norm(v))
}

/// `Y(xi) = [[0,0,2],[0,xi,0],[0,0,0]]` for `|xi| <= 1`; always a disk
/// matrix of radius 1, never a partial-smoothness point.
pub fn y_family(xi: Complex64) -> Result<ComplexMatrix> {
    if xi.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidInput(format!("|xi| = {} > 1", xi.norm())));
    }
    let mut m = ComplexMatrix::zeros(3);
    m[(0, 2)] = Complex64::new(2.0, 0.0);
    m[(1, 1)] = xi;
    Ok(m)
}

/// `Z(phi, psi) = e^{i psi} [[0, sqrt(2) cos phi, 2 sin phi],
/// [0, -sin phi, sqrt(2) cos phi], [0, 0, 0]]` for `phi in [0, pi/2]`;
/// unit-disk matrices, partial-smoothness points exactly when
/// `phi != pi/2`.
pub fn z_family(phi: f64, psi: f64) -> Result<ComplexMatrix> {
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&phi) {
        return Err(Error::InvalidInput(format!("phi = {phi} outside [0, pi/2]")));
    }
    let s2 = 2.0_f64.sqrt();
    let phase = Complex64::from_polar(1.0, psi);
    let mut m = ComplexMatrix::zeros(3);
    m[(0, 1)] = phase * s2 * phi.cos();
    m[(0, 2)] = phase * 2.0 * phi.sin();
    m[(1, 1)] = -phase * phi.sin();
    m[(1, 2)] = phase * s2 * phi.cos();
    Ok(m)
}

/// `r(X)^{n-1} / ||X^{n-1}||_2`, bounded below by 1/2 and attained by the
/// Crabb matrix; errors when `X^{n-1} = 0`.
pub fn crouzeix_ratio(x: &ComplexMatrix) -> Result<f64> {
    let n = x.n();
    let power = x.pow_int(n - 1);
    let denom = crate::linalg::spectral_norm(&power);
    if denom == 0.0 {
        return Err(Error::InvalidInput(
            "X^{n-1} vanishes (nilpotent of lower index)".into(),
        ));
    }
    let r = numerical_radius(x, DEFAULT_GRID).value;
    Ok(r.powi(n as i32 - 1) / denom)
}
