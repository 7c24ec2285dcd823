//! Jacobi-preconditioned BiCGSTAB with iterative refinement.

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Target relative residual `||b - A x|| / ||b||`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_refinements: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-14,
            max_iterations: 5000,
            max_refinements: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `b - A x` together with the rounding floor `eps * || |A| |x| ||` of that residual.
fn residual(a: &SparseMatrix, b: &[f64], x: &[f64]) -> (Vec<f64>, f64) {
    let mut r = vec![0.0; b.len()];
    let mut floor = 0.0;
    for (i, ri) in r.iter_mut().enumerate() {
        let mut s = b[i];
        let mut mag = b[i].abs();
        for (c, v) in a.row(i) {
            s = (-v).mul_add(x[c], s);
            mag += (v * x[c]).abs();
        }
        *ri = s;
        floor += mag * mag;
    }
    (r, f64::EPSILON * floor.sqrt())
}

/// One BiCGSTAB run from a zero initial guess, right-preconditioned by `diag(A)`.
fn bicgstab(a: &SparseMatrix, b: &[f64], inv_diag: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, usize) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return (x, 0);
    }
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ph = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut sh = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return (x, it);
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            ph[i] = p[i] * inv_diag[i];
        }
        a.matvec_into(&ph, &mut v);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 {
            return (x, it);
        }
        alpha = rho / denom;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) <= tol * bnorm {
            for i in 0..n {
                x[i] += alpha * ph[i];
            }
            return (x, it);
        }
        for i in 0..n {
            sh[i] = s[i] * inv_diag[i];
        }
        a.matvec_into(&sh, &mut t);
        let tt = dot(&t, &t);
        omega = if tt == 0.0 { 0.0 } else { dot(&t, &s) / tt };
        for i in 0..n {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        if norm(&r) <= tol * bnorm {
            return (x, it);
        }
    }
    (x, max_iter)
}

/// Solve `A x = b` to the requested relative residual, or to the rounding floor of
/// the residual evaluation when that floor lies above the request.
pub fn solve(a: &SparseMatrix, b: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, SolveStats)> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((
            x,
            SolveStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut iterations = 0;
    let mut relres = f64::INFINITY;
    for _ in 0..=opts.max_refinements {
        let (r, floor) = residual(a, b, &x);
        relres = norm(&r) / bnorm;
        if relres <= opts.tolerance || relres <= 4.0 * floor / bnorm {
            return Ok((
                x,
                SolveStats {
                    iterations,
                    relative_residual: relres,
                },
            ));
        }
        let remaining = opts.max_iterations.saturating_sub(iterations);
        if remaining == 0 {
            break;
        }
        let (d, it) = bicgstab(a, &r, &inv_diag, 1e-10, remaining);
        iterations += it;
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += di;
        }
    }
    Err(Error::IterativeSolveNoConvergence {
        iterations,
        residual: relres,
        tolerance: opts.tolerance,
    })
}
