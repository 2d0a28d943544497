//! Tiny dense quadratic programs over simplex-type weight sets:
//! `min 1/2 mu' K mu - b' mu` with `mu >= 0` and either `sum mu <= 1` or
//! `sum mu = 1`.  These are the master problems of the cutting-plane and
//! bundle methods; `K` is a Gram matrix of at most a few dozen generators.
//!
//! Solved by projected gradient with Armijo backtracking, then polished by
//! a direct solve on the identified active face (accepted only when feasible
//! and at least as good).

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSet {
    /// `mu >= 0, sum mu <= 1` (hull of the generators and the origin).
    CappedSimplex,
    /// `mu >= 0, sum mu = 1` (hull of the generators).
    Simplex,
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if uj - candidate > 0.0 {
            tau = candidate;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

fn project(v: &[f64], set: WeightSet) -> Vec<f64> {
    match set {
        WeightSet::Simplex => project_simplex(v),
        WeightSet::CappedSimplex => {
            let clipped: Vec<f64> = v.iter().map(|&x| x.max(0.0)).collect();
            if clipped.iter().sum::<f64>() <= 1.0 {
                clipped
            } else {
                project_simplex(v)
            }
        }
    }
}

fn objective(gram: &[Vec<f64>], b: &[f64], mu: &[f64]) -> f64 {
    let mut quad = 0.0;
    for (i, row) in gram.iter().enumerate() {
        if mu[i] == 0.0 {
            continue;
        }
        for (j, &kij) in row.iter().enumerate() {
            quad += mu[i] * kij * mu[j];
        }
    }
    0.5 * quad - b.iter().zip(mu.iter()).map(|(x, y)| x * y).sum::<f64>()
}

fn gradient(gram: &[Vec<f64>], b: &[f64], mu: &[f64]) -> Vec<f64> {
    gram.iter()
        .zip(b.iter())
        .map(|(row, bi)| row.iter().zip(mu.iter()).map(|(k, m)| k * m).sum::<f64>() - bi)
        .collect()
}

/// Minimum-norm solution of a (possibly rank-deficient) symmetric system
/// through the eigendecomposition; Gram matrices of generators that span a
/// low-dimensional face are singular by construction, so plain elimination
/// is not an option here.
fn solve_symmetric_pinv(a: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    use crate::linalg::{eigh, ComplexMatrix, HermitianMatrix};
    use num_complex::Complex64;
    let n = rhs.len();
    let m = ComplexMatrix::from_fn(n, |i, j| Complex64::new(0.5 * (a[i][j] + a[j][i]), 0.0));
    let eig = eigh(&HermitianMatrix::symmetrize(&m)).ok()?;
    let scale = eig
        .values
        .iter()
        .map(|v| v.abs())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; n];
    for k in 0..n {
        if eig.values[k].abs() <= 1e-12 * scale {
            continue;
        }
        let q: Vec<f64> = (0..n).map(|i| eig.vectors[(i, k)].re).collect();
        let coeff: f64 = q.iter().zip(rhs.iter()).map(|(qi, bi)| qi * bi).sum();
        for (xi, qi) in x.iter_mut().zip(q.iter()) {
            *xi += coeff / eig.values[k] * qi;
        }
    }
    Some(x)
}

/// Direct solve on the active face identified by a PG solution; returns an
/// improved feasible point when the face solve is feasible.
fn polish(
    gram: &[Vec<f64>],
    b: &[f64],
    set: WeightSet,
    mu: &[f64],
) -> Option<Vec<f64>> {
    let k = mu.len();
    let total: f64 = mu.iter().sum();
    let floor = 1e-7 * total.max(1e-30);
    let support: Vec<usize> = (0..k).filter(|&j| mu[j] > floor.max(1e-12)).collect();
    if support.is_empty() {
        return None;
    }
    let s = support.len();
    let total: f64 = mu.iter().sum();
    let equality = set == WeightSet::Simplex || total > 1.0 - 1e-9;
    let solution = if equality {
        // Bordered KKT system with the sum constraint.
        let mut a = vec![vec![0.0; s + 1]; s + 1];
        let mut rhs = vec![0.0; s + 1];
        for (i, &si) in support.iter().enumerate() {
            for (j, &sj) in support.iter().enumerate() {
                a[i][j] = gram[si][sj];
            }
            a[i][s] = 1.0;
            a[s][i] = 1.0;
            rhs[i] = b[si];
        }
        rhs[s] = 1.0;
        let sol = solve_symmetric_pinv(&a, &rhs)?;
        sol[..s].to_vec()
    } else {
        let mut a = vec![vec![0.0; s]; s];
        let mut rhs = vec![0.0; s];
        for (i, &si) in support.iter().enumerate() {
            for (j, &sj) in support.iter().enumerate() {
                a[i][j] = gram[si][sj];
            }
            rhs[i] = b[si];
        }
        solve_symmetric_pinv(&a, &rhs)?
    };
    if solution.iter().any(|&x| x < -1e-12) {
        return None;
    }
    let mut out = vec![0.0; k];
    let mut sum = 0.0;
    for (&idx, &val) in support.iter().zip(solution.iter()) {
        let v = val.max(0.0);
        out[idx] = v;
        sum += v;
    }
    if set == WeightSet::CappedSimplex && sum > 1.0 + 1e-12 {
        return None;
    }
    if set == WeightSet::Simplex && (sum - 1.0).abs() > 1e-9 {
        return None;
    }
    Some(out)
}

/// Solves the weight QP; deterministic, warm-startable.
pub fn solve_weight_qp(
    gram: &[Vec<f64>],
    b: &[f64],
    set: WeightSet,
    warm: Option<&[f64]>,
) -> Vec<f64> {
    let k = b.len();
    if k == 0 {
        return Vec::new();
    }
    let start = match warm {
        Some(w) if w.len() == k => w.to_vec(),
        _ => vec![0.0; k],
    };
    let mut mu = project(&start, set);
    // Gershgorin bound on the Gram spectrum sets the base step.
    let lipschitz = gram
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let mut step = 1.0 / lipschitz;
    let scale = b.iter().map(|x| x.abs()).fold(1.0_f64, f64::max);
    let tol = 1e-11 * scale;
    let mut f_mu = objective(gram, b, &mu);
    // Modest budget: the active-set polish below supplies the precision,
    // projected gradient only has to identify the face.
    for _ in 0..1500 {
        let g = gradient(gram, b, &mu);
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = mu.iter().zip(g.iter()).map(|(m, gi)| m - step * gi).collect();
            let cand = project(&trial, set);
            let diff: Vec<f64> = cand.iter().zip(mu.iter()).map(|(c, m)| c - m).collect();
            let lin: f64 = g.iter().zip(diff.iter()).map(|(a, d)| a * d).sum();
            let quad: f64 = diff.iter().map(|d| d * d).sum();
            let f_cand = objective(gram, b, &cand);
            if f_cand <= f_mu + lin + 0.5 * quad / step + 1e-18 * scale {
                accepted = Some((cand, f_cand, quad.sqrt()));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, f_cand, move_norm)) = accepted else { break };
        mu = cand;
        f_mu = f_cand;
        step = (step * 1.3).min(1e6 / lipschitz);
        if move_norm <= tol * step.min(1.0) {
            break;
        }
    }
    if let Some(p) = polish(gram, b, set, &mu) {
        if objective(gram, b, &p) <= f_mu + 1e-15 * scale {
            return p;
        }
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection_basics() {
        let p = project_simplex(&[0.4, 0.3]);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-14);
        assert!((p[0] - 0.55).abs() < 1e-14);

        let p = project(&[-0.2, 0.3], WeightSet::CappedSimplex);
        assert_eq!(p, vec![0.0, 0.3]);

        let p = project(&[2.0, 0.0], WeightSet::Simplex);
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn qp_projects_onto_segment() {
        // Generators y1 = (1, 0), y2 = (0, 1); target (2, 2).  Capped
        // simplex optimum is the cap face midpoint (1/2, 1/2) by symmetry.
        let gram = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let b = vec![2.0, 2.0];
        let mu = solve_weight_qp(&gram, &b, WeightSet::CappedSimplex, None);
        assert!((mu[0] - 0.5).abs() < 1e-9 && (mu[1] - 0.5).abs() < 1e-9, "{mu:?}");

        // Interior case: target (0.2, 0.1) is reachable exactly.
        let b = vec![0.2, 0.1];
        let mu = solve_weight_qp(&gram, &b, WeightSet::CappedSimplex, None);
        assert!((mu[0] - 0.2).abs() < 1e-10 && (mu[1] - 0.1).abs() < 1e-10);
    }

    #[test]
    fn qp_simplex_handles_correlated_generators() {
        // Nearly parallel generators stress the PG tail; the polish step
        // must still land on the exact face solution.
        let y = [vec![1.0, 0.0], vec![0.999, 0.04], vec![0.0, 1.0]];
        let t = [0.6, 0.5];
        let mut gram = vec![vec![0.0; 3]; 3];
        let mut b = vec![0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                gram[i][j] = y[i][0] * y[j][0] + y[i][1] * y[j][1];
            }
            b[i] = y[i][0] * t[0] + y[i][1] * t[1];
        }
        let mu = solve_weight_qp(&gram, &b, WeightSet::Simplex, None);
        let sum: f64 = mu.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
        let point = [
            mu[0] * y[0][0] + mu[1] * y[1][0] + mu[2] * y[2][0],
            mu[0] * y[0][1] + mu[1] * y[1][1] + mu[2] * y[2][1],
        ];
        // Optimal projection of t onto the hull: check optimality via
        // the variational inequality against all vertices.
        for yi in &y {
            let grad = [point[0] - t[0], point[1] - t[1]];
            let slack = grad[0] * (yi[0] - point[0]) + grad[1] * (yi[1] - point[1]);
            assert!(slack >= -1e-9, "variational inequality violated: {slack}");
        }
    }
}
