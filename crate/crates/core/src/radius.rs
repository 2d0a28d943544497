//! Support function of the field of values over the unit circle, and the
//! quantities built from it: numerical radius, inner numerical radius, disk
//! distortion, boundary sampling.
//!
//! The support value of `W(X)` in direction `w = e^{i theta}` is
//! `lambda_max(Phi(w* X))`, so every operation here reduces to Hermitian
//! eigenvalue problems on a grid of angles plus derivative-free refinement.

use num_complex::Complex64;

use crate::linalg::{eigh, eigh_values, vec_dot, ComplexMatrix};
use crate::{Error, Result};

/// One support evaluation at angle `theta`.
#[derive(Debug, Clone)]
pub struct SupportSample {
    /// Angle in `[0, 2 pi)`.
    pub theta: f64,
    /// `e^{i theta}`.
    pub w: Complex64,
    /// `lambda_max(Phi(e^{-i theta} X))`, the support value.
    pub lambda: f64,
    /// Unit eigenvector for `lambda`.
    pub g: Vec<Complex64>,
    /// Gap `lambda_max - lambda_2` (infinite for n = 1).
    pub gap: f64,
}

/// Result of maximizing (or minimizing) the support value over the circle.
#[derive(Debug, Clone)]
pub struct RadiusResult {
    /// Extremal support value after refinement.
    pub value: f64,
    /// Angle attaining it; smallest such angle on ties.
    pub argmax_theta: f64,
    /// The grid samples the scan was based on.
    pub samples: Vec<SupportSample>,
    /// Set when the extremum is negative, meaning the origin lies outside
    /// `W(X)`; only meaningful for `inner_support`.
    pub origin_outside: bool,
}

/// Support sample of `W(X)` in direction `e^{i theta}`.
pub fn support(x: &ComplexMatrix, theta: f64) -> SupportSample {
    let w = Complex64::from_polar(1.0, theta);
    let rotated = x.scale(w.conj());
    let eig = eigh(&rotated.hermitian_part()).expect("jacobi convergence on finite input");
    SupportSample {
        theta,
        w,
        lambda: eig.values[0],
        g: eig.vector(0),
        gap: eig.top_gap(),
    }
}

/// Angular derivative `d/d theta lambda_max(Phi(e^{-i theta} X))` at a
/// sample with a simple largest eigenvalue; equals `Im(w* g'Xg)`.
///
/// Errors when the gap is below `1e-10`, where the eigenvalue curve may be
/// nonsmooth.
pub fn support_derivative(x: &ComplexMatrix, s: &SupportSample) -> Result<f64> {
    if s.gap <= 1e-10 {
        return Err(Error::NonsimpleEigenvalue {
            theta: s.theta,
            gap: s.gap,
        });
    }
    let xg = x.matvec(&s.g);
    let gxg = vec_dot(&s.g, &xg);
    Ok((s.w.conj() * gxg).im)
}

const REFINE_WIDTH: f64 = 1e-12;
/// Relative spread below which the support curve is treated as constant
/// (disk matrix); refinement is pointless against noise at this level.
const PLATEAU_REL: f64 = 1e-13;

fn golden_extremize(
    x: &ComplexMatrix,
    mut lo: f64,
    mut hi: f64,
    maximize: bool,
    width: f64,
) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let sign = if maximize { 1.0 } else { -1.0 };
    let f = |theta: f64| sign * support(x, theta).lambda;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > width {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, sign * f(mid))
}

/// Support value alone, skipping the eigenvector; the hot path for scans.
pub(crate) fn support_value(x: &ComplexMatrix, theta: f64) -> f64 {
    let w = Complex64::from_polar(1.0, theta);
    let rotated = x.scale(w.conj());
    eigh_values(&rotated.hermitian_part()).expect("jacobi convergence on finite input")[0]
}

fn golden_extremize_value(
    x: &ComplexMatrix,
    mut lo: f64,
    mut hi: f64,
    maximize: bool,
    width: f64,
) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let sign = if maximize { 1.0 } else { -1.0 };
    let f = |theta: f64| sign * support_value(x, theta);
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > width {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, sign * f(mid))
}

/// Lean scan result: extremal value and angle plus the raw grid values.
pub(crate) struct ValueScan {
    pub value: f64,
    pub theta: f64,
    pub lambdas: Vec<f64>,
    pub plateau: bool,
}

/// Value-only version of the circle scan, for the optimizers' inner loops.
pub(crate) fn extremize_values(
    x: &ComplexMatrix,
    grid: usize,
    maximize: bool,
    refine_top: usize,
    width: f64,
) -> ValueScan {
    let n = x.n();
    let grid = grid.max(2 * n + 2).max(4);
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    let lambdas: Vec<f64> = (0..grid).map(|k| support_value(x, k as f64 * step)).collect();
    let max_l = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_l = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = max_l.abs().max(min_l.abs()).max(1.0);
    let sign = if maximize { 1.0 } else { -1.0 };
    if max_l - min_l <= PLATEAU_REL * scale {
        let (k, _) = lambdas
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| (sign * **a).partial_cmp(&(sign * **b)).unwrap())
            .unwrap();
        return ValueScan {
            value: lambdas[k],
            theta: k as f64 * step,
            lambdas,
            plateau: true,
        };
    }
    let mut candidates: Vec<usize> = (0..grid)
        .filter(|&k| {
            let prev = lambdas[(k + grid - 1) % grid];
            let next = lambdas[(k + 1) % grid];
            sign * lambdas[k] >= sign * prev && sign * lambdas[k] >= sign * next
        })
        .collect();
    candidates.sort_by(|&i, &j| (sign * lambdas[j]).partial_cmp(&(sign * lambdas[i])).unwrap());
    candidates.truncate(refine_top.max(1));
    let mut best_value = sign * f64::NEG_INFINITY;
    let mut best_theta = 0.0;
    for &k in &candidates {
        let center = k as f64 * step;
        let (theta, value) = golden_extremize_value(x, center - step, center + step, maximize, width);
        let theta = theta.rem_euclid(2.0 * std::f64::consts::PI);
        let better = sign * value > sign * best_value + 1e-15 * scale;
        let tie = (value - best_value).abs() <= 1e-15 * scale && theta < best_theta;
        if better || tie {
            best_value = value;
            best_theta = theta;
        }
    }
    ValueScan {
        value: best_value,
        theta: best_theta,
        lambdas,
        plateau: false,
    }
}

pub(crate) fn extremize(
    x: &ComplexMatrix,
    grid: usize,
    maximize: bool,
    refine_top: usize,
    width: f64,
) -> RadiusResult {
    let n = x.n();
    let grid = grid.max(2 * n + 2).max(4);
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    let samples: Vec<SupportSample> = (0..grid).map(|k| support(x, k as f64 * step)).collect();
    let lambdas: Vec<f64> = samples.iter().map(|s| s.lambda).collect();
    let max_l = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_l = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = max_l.abs().max(min_l.abs()).max(1.0);
    let sign = if maximize { 1.0 } else { -1.0 };

    let mut best_value;
    let mut best_theta;
    if max_l - min_l <= PLATEAU_REL * scale {
        // Constant support curve: report the best grid point directly.
        let (k, _) = lambdas
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| (sign * **a).partial_cmp(&(sign * **b)).unwrap())
            .unwrap();
        best_theta = samples[k].theta;
        best_value = lambdas[k];
    } else {
        // Circular local extrema of the grid curve, refined by golden
        // section.  The support curve stems from a degree <= 2n trigonometric
        // determinant, so only the strongest few candidates can win.
        let mut candidates: Vec<usize> = (0..grid)
            .filter(|&k| {
                let prev = lambdas[(k + grid - 1) % grid];
                let next = lambdas[(k + 1) % grid];
                sign * lambdas[k] >= sign * prev && sign * lambdas[k] >= sign * next
            })
            .collect();
        candidates.sort_by(|&i, &j| (sign * lambdas[j]).partial_cmp(&(sign * lambdas[i])).unwrap());
        candidates.truncate(refine_top.max(1));
        best_value = sign * f64::NEG_INFINITY;
        best_theta = 0.0;
        for &k in &candidates {
            let center = k as f64 * step;
            let (theta, value) = golden_extremize(x, center - step, center + step, maximize, width);
            let theta = theta.rem_euclid(2.0 * std::f64::consts::PI);
            let better = sign * value > sign * best_value + 1e-15 * scale;
            let tie = (value - best_value).abs() <= 1e-15 * scale && theta < best_theta;
            if better || tie {
                best_value = value;
                best_theta = theta;
            }
        }
    }
    RadiusResult {
        value: best_value,
        argmax_theta: best_theta,
        origin_outside: !maximize && best_value < 0.0,
        samples,
    }
}

/// Numerical radius `r(X) = max_w lambda_max(Phi(w* X))`.
///
/// Scans a uniform grid (at least `2n + 2` points), then refines every
/// surviving grid-local maximum by golden section to width 1e-12.
pub fn numerical_radius(x: &ComplexMatrix, grid: usize) -> RadiusResult {
    extremize(x, grid, true, 2 * x.n() + 2, REFINE_WIDTH)
}

/// Global minimum of the support value over the circle.
///
/// When `0` lies in `W(X)` this equals the inner numerical radius
/// `min { |z| : z on the boundary }`; when the minimum is negative the
/// origin is outside the field of values and the raw value is reported with
/// `origin_outside` set.
pub fn inner_support(x: &ComplexMatrix, grid: usize) -> RadiusResult {
    extremize(x, grid, false, 2 * x.n() + 2, REFINE_WIDTH)
}

/// Distortion `r(X) - min_w lambda_max(Phi(w* X))`; zero exactly on disk
/// matrices.
pub fn disk_distortion(x: &ComplexMatrix, grid: usize) -> f64 {
    numerical_radius(x, grid).value - inner_support(x, grid).value
}

/// One field-of-values boundary point.
#[derive(Debug, Clone)]
pub struct BoundaryPoint {
    pub theta: f64,
    /// Support point `g* X g`, on the boundary of `W(X)`.
    pub z: Complex64,
    pub lambda: f64,
    pub gap: f64,
    /// False when the largest eigenvalue is not simple there; the support
    /// set is then a face rather than a single point.
    pub simple: bool,
}

/// Samples `N` boundary support points `z(theta_k) = g(theta_k)* X g(theta_k)`
/// at equispaced angles.
pub fn fov_boundary(x: &ComplexMatrix, n_samples: usize) -> Result<Vec<BoundaryPoint>> {
    if n_samples < 3 {
        return Err(Error::InvalidInput(format!(
            "fov boundary needs at least 3 samples, got {n_samples}"
        )));
    }
    let step = 2.0 * std::f64::consts::PI / n_samples as f64;
    Ok((0..n_samples)
        .map(|k| {
            let s = support(x, k as f64 * step);
            let xg = x.matvec(&s.g);
            let z = vec_dot(&s.g, &xg);
            BoundaryPoint {
                theta: s.theta,
                z,
                lambda: s.lambda,
                gap: s.gap,
                simple: s.gap > 1e-10,
            }
        })
        .collect())
}

/// CSV for boundary samples: header `theta,re,im,lambda,gap`, 17 significant
/// digits.
pub fn fov_boundary_csv(points: &[BoundaryPoint]) -> String {
    let mut out = String::from("theta,re,im,lambda,gap\n");
    for p in points {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            p.theta, p.z.re, p.z.im, p.lambda, p.gap
        ));
    }
    out
}

pub const DEFAULT_GRID: usize = 256;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{crabb, e0, jordan2};
    use crate::linalg::spectral_norm;
    use crate::rng::CounterRng;
    use num_complex::Complex64;

    fn diag_1_m1() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    /// Independent support oracle: brute-force maximum of `Re(w* u'Xu)` over
    /// random unit vectors, polished by shifted power iteration on
    /// `Phi(w*X)` so the bound is approached from below to high accuracy.
    fn support_oracle(x: &ComplexMatrix, theta: f64, rng: &mut CounterRng, raw_draws: usize) -> (f64, f64) {
        let w = Complex64::from_polar(1.0, theta);
        let phi = x.scale(w.conj()).hermitian_part();
        let m = phi.as_matrix();
        let mut best_raw = f64::NEG_INFINITY;
        let mut best_u = rng.unit_vector(x.n());
        for _ in 0..raw_draws {
            let u = rng.unit_vector(x.n());
            let q = vec_dot(&u, &m.matvec(&u)).re;
            if q > best_raw {
                best_raw = q;
                best_u = u;
            }
        }
        // Power iteration on Phi + shift I converges to the top eigenvector.
        let shift = m.fro_norm() + 1.0;
        let mut u = best_u;
        for _ in 0..200 {
            let mut v = m.matvec(&u);
            for (vi, ui) in v.iter_mut().zip(u.iter()) {
                *vi += shift * ui;
            }
            let norm = crate::linalg::vec_norm(&v);
            u = v.iter().map(|z| z / norm).collect();
        }
        let polished = vec_dot(&u, &m.matvec(&u)).re;
        (best_raw, polished)
    }

    #[test]
    fn support_examples() {
        let j2 = jordan2();
        for theta in [0.0, 0.7, 2.0, 5.5] {
            assert!((support(&j2, theta).lambda - 1.0).abs() < 1e-12);
        }
        let id = ComplexMatrix::identity(3);
        for theta in [0.0, 1.0, 3.0] {
            assert!((support(&id, theta).lambda - theta.cos()).abs() < 1e-12);
        }
        let s = support(&diag_1_m1(), std::f64::consts::FRAC_PI_2);
        assert!(s.lambda.abs() < 1e-12);
    }

    #[test]
    fn support_matches_brute_force_oracle() {
        let mut rng = CounterRng::new(31, 0);
        for trial in 0..8 {
            let x = rng.complex_matrix(3);
            let theta = 2.0 * std::f64::consts::PI * rng.uniform();
            let s = support(&x, theta);
            let (raw, polished) = support_oracle(&x, theta, &mut rng, 2000);
            assert!(raw <= s.lambda + 1e-6, "trial {trial}: raw {raw} > {0}", s.lambda);
            assert!(
                (polished - s.lambda).abs() < 1e-8 * (1.0 + s.lambda.abs()),
                "trial {trial}: polished {polished} vs {}",
                s.lambda
            );
        }
    }

    #[test]
    fn derivative_examples_and_finite_differences() {
        let j2 = jordan2();
        for theta in [0.3, 1.9] {
            let s = support(&j2, theta);
            assert!(support_derivative(&j2, &s).unwrap().abs() < 1e-10);
        }
        // For n >= 2 the identity has a multiple top eigenvalue, so the
        // derivative is only defined in the scalar case.
        let id = ComplexMatrix::identity(1);
        for theta in [0.4, 2.2] {
            let s = support(&id, theta);
            let d = support_derivative(&id, &s).unwrap();
            assert!((d + theta.sin()).abs() < 1e-10);
        }
        let mut rng = CounterRng::new(32, 0);
        let mut checked = 0;
        while checked < 20 {
            let x = rng.complex_matrix(4);
            let theta = 2.0 * std::f64::consts::PI * rng.uniform();
            let s = support(&x, theta);
            if s.gap < 1e-3 {
                continue;
            }
            let d = support_derivative(&x, &s).unwrap();
            let h = 1e-5;
            let fd = (support(&x, theta + h).lambda - support(&x, theta - h).lambda) / (2.0 * h);
            assert!(
                (d - fd).abs() <= 1e-6 * (1.0 + d.abs()),
                "analytic {d} vs fd {fd}"
            );
            checked += 1;
        }
    }

    #[test]
    fn radius_of_crabb_and_e0() {
        let k = crabb(5).unwrap();
        let r = numerical_radius(&k, DEFAULT_GRID);
        assert!((r.value - 1.0).abs() < 1e-10, "r(K) = {}", r.value);

        // Oracle agreement first, then the frozen value 0.5.
        let e = e0();
        let mut rng = CounterRng::new(33, 0);
        let mut brute = f64::NEG_INFINITY;
        for _ in 0..64 {
            let theta = 2.0 * std::f64::consts::PI * rng.uniform();
            let (_, polished) = support_oracle(&e, theta, &mut rng, 50);
            brute = brute.max(polished);
        }
        let r = numerical_radius(&e, DEFAULT_GRID);
        assert!((r.value - brute).abs() < 1e-6, "oracle {brute} vs {}", r.value);
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn radius_is_positively_homogeneous() {
        let mut rng = CounterRng::new(34, 0);
        for _ in 0..5 {
            let x = rng.complex_matrix(3);
            let alpha = 0.3 + 2.0 * rng.uniform();
            let r1 = numerical_radius(&x.scale_re(alpha), 64).value;
            let r2 = alpha * numerical_radius(&x, 64).value;
            assert!((r1 - r2).abs() < 1e-9 * (1.0 + r2));
        }
    }

    #[test]
    fn inner_support_examples() {
        let k = crabb(4).unwrap();
        let inner = inner_support(&k, DEFAULT_GRID);
        assert!((inner.value - 1.0).abs() < 1e-9);
        assert!(!inner.origin_outside);

        let inner = inner_support(&diag_1_m1(), DEFAULT_GRID);
        assert!(inner.value.abs() < 1e-10);

        let inner = inner_support(&ComplexMatrix::identity(2), DEFAULT_GRID);
        assert!((inner.value + 1.0).abs() < 1e-10);
        assert!(inner.origin_outside);
    }

    #[test]
    fn distortion_examples() {
        assert!(disk_distortion(&crabb(5).unwrap(), DEFAULT_GRID).abs() < 1e-9);
        assert!(disk_distortion(&jordan2(), DEFAULT_GRID).abs() < 1e-12);
        // W(diag(1,-1)) = [-1, 1]: support |cos theta| has max 1, min 0.
        let d = disk_distortion(&diag_1_m1(), DEFAULT_GRID);
        assert!((d - 1.0).abs() < 1e-10, "distortion {d}");
    }

    #[test]
    fn boundary_samples() {
        let pts = fov_boundary(&jordan2(), 8).unwrap();
        assert_eq!(pts.len(), 8);
        for p in &pts {
            assert!((p.z.norm() - 1.0).abs() < 1e-9);
            // Support identity Re(w* z) = lambda.
            let w = Complex64::from_polar(1.0, p.theta);
            assert!(((w.conj() * p.z).re - p.lambda).abs() < 1e-10);
        }
        for p in fov_boundary(&ComplexMatrix::identity(2), 5).unwrap() {
            assert!((p.z - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        for p in fov_boundary(&h, 16).unwrap() {
            assert!(p.z.im.abs() < 1e-10);
            assert!(p.z.re > -1e-10 && p.z.re < 1.0 + 1e-10);
        }
        assert!(fov_boundary(&jordan2(), 2).is_err());
    }

    #[test]
    fn power_inequality_and_bound() {
        let mut rng = CounterRng::new(35, 0);
        for trial in 0..10 {
            let n = 2 + (trial % 4);
            let x = rng.complex_matrix(n);
            let r1 = numerical_radius(&x, 64).value;
            for k in 1..=5 {
                let xk = x.pow_int(k);
                let rk = numerical_radius(&xk, 64).value;
                assert!(rk <= r1.powi(k as i32) + 1e-8, "power inequality k={k}");
                assert!(
                    spectral_norm(&xk) <= 2.0 * r1.powi(k as i32) + 1e-8,
                    "power bound k={k}"
                );
            }
        }
    }

    #[test]
    fn norm_axioms_and_unitary_invariance() {
        let mut rng = CounterRng::new(36, 0);
        for _ in 0..8 {
            let x = rng.complex_matrix(3);
            let y = rng.complex_matrix(3);
            let rx = numerical_radius(&x, 64).value;
            let ry = numerical_radius(&y, 64).value;
            let rxy = numerical_radius(&x.add_mat(&y), 64).value;
            assert!(rxy <= rx + ry + 1e-9, "triangle inequality");

            let u = rng.unitary(3);
            let conj = &(&u.adjoint() * &x) * &u;
            let rc = numerical_radius(&conj, 64).value;
            assert!((rc - rx).abs() < 1e-9 * (1.0 + rx), "unitary invariance");
        }
        assert!(numerical_radius(&ComplexMatrix::zeros(3), 64).value.abs() < 1e-14);
    }
}
