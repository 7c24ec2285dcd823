//! Largest-magnitude eigenvalues of a real linear operator.
//!
//! Large operators go through a restarted Arnoldi iteration. After each sweep the
//! wanted Ritz vectors of the projected matrix are turned into a real orthonormal
//! basis `Q`, the Krylov basis is compressed to `V Q`, and the old residual vector
//! continues the expansion. Small operators are assembled and handed to a dense
//! eigensolver.

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A real square linear map `y = A x`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

/// Wraps a closure as a [`LinearOperator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> LinearOperator for FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        (self.f)(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Ritz residual bound for convergence.
    pub tolerance: f64,
    pub max_restarts: usize,
    /// Krylov subspace size; defaults to `max(2k + 20, 40)`.
    pub subspace: Option<usize>,
    /// Seed of the starting vector.
    pub seed: u64,
    /// Operators up to this size are solved densely.
    pub dense_threshold: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_restarts: 500,
            subspace: None,
            seed: 20_100_517,
            dense_threshold: 2500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RitzPair {
    pub value: Complex64,
    /// Unit-norm eigenvector estimate (Arnoldi path only).
    pub vector: Option<Vec<Complex64>>,
    /// `||A x - value x||` for the unit vector above.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Dense,
    Arnoldi { restarts: usize, applications: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub pairs: Vec<RitzPair>,
    pub method: EigenMethod,
}

impl EigenResult {
    pub fn values(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }
}

fn sort_by_magnitude(values: &mut [(Complex64, usize)]) {
    values.sort_by(|a, b| {
        b.0.norm()
            .total_cmp(&a.0.norm())
            .then(b.0.re.total_cmp(&a.0.re))
            .then(b.0.im.total_cmp(&a.0.im))
    });
}

/// The `k` largest-magnitude eigenvalues, sorted by descending modulus.
pub fn leading_eigenvalues(op: &dyn LinearOperator, k: usize, opts: &EigenOptions) -> Result<EigenResult> {
    check_k(op.dim(), k)?;
    if op.dim() <= opts.dense_threshold {
        let n = op.dim();
        let mut a = Mat::<f64>::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            op.apply(&e, &mut col)?;
            e[j] = 0.0;
            for i in 0..n {
                a[(i, j)] = col[i];
            }
        }
        dense_leading(&a, k)
    } else {
        arnoldi(op, k, opts)
    }
}

fn check_k(dim: usize, k: usize) -> Result<()> {
    if k == 0 || k > dim {
        return Err(Error::InvalidInput(format!(
            "requested {k} eigenvalues of a {dim}-dimensional operator"
        )));
    }
    Ok(())
}

/// Dense eigenvalues of an assembled matrix.
pub fn dense_leading(a: &Mat<f64>, k: usize) -> Result<EigenResult> {
    check_k(a.nrows(), k)?;
    let ev = a.eigenvalues().map_err(|_| Error::NoConvergence {
        iterations: 0,
        residual: f64::NAN,
    })?;
    let mut tagged: Vec<(Complex64, usize)> = ev.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
    sort_by_magnitude(&mut tagged);
    Ok(EigenResult {
        pairs: tagged
            .into_iter()
            .take(k)
            .map(|(value, _)| RitzPair {
                value,
                vector: None,
                residual: None,
            })
            .collect(),
        method: EigenMethod::Dense,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Orthogonalize `w` against `basis` with one re-orthogonalization pass; returns coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let d: f64 = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            *c += d;
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= d * vi;
            }
        }
    }
    coeffs
}

fn random_unit(rng: &mut ChaCha8Rng, basis: &[Vec<f64>], n: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(basis, &mut v);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return v;
        }
    }
}

/// Restarted Arnoldi iteration (always Krylov, regardless of size).
pub fn arnoldi(op: &dyn LinearOperator, k: usize, opts: &EigenOptions) -> Result<EigenResult> {
    let n = op.dim();
    check_k(n, k)?;
    let m = opts.subspace.unwrap_or((2 * k + 20).max(40)).min(n);
    if m <= k {
        return Err(Error::InvalidInput(format!(
            "Krylov subspace of size {m} cannot hold {k} eigenvalues"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(random_unit(&mut rng, &[], n));
    // h[i][j], (m + 1) x m
    let mut h = vec![vec![0.0; m]; m + 1];
    let mut start = 0;
    let mut applications = 0;
    let mut worst = f64::INFINITY;
    let mut w = vec![0.0; n];

    for restart in 0..=opts.max_restarts {
        for j in start..m {
            op.apply(&basis[j], &mut w)?;
            applications += 1;
            let coeffs = orthogonalize(&basis[..=j], &mut w);
            for (i, c) in coeffs.into_iter().enumerate() {
                h[i][j] = c;
            }
            let beta = norm(&w);
            h[j + 1][j] = beta;
            let next = if beta > 1e-12 * h.iter().take(j + 1).map(|r| r[j].abs()).fold(1e-300, f64::max) {
                w.iter().map(|x| x / beta).collect()
            } else {
                // Invariant subspace found; continue with a fresh direction.
                h[j + 1][j] = 0.0;
                random_unit(&mut rng, &basis, n)
            };
            basis.truncate(j + 1);
            basis.push(next);
        }

        let hm = Mat::<f64>::from_fn(m, m, |i, j| h[i][j]);
        let evd = hm.eigen().map_err(|_| Error::NoConvergence {
            iterations: restart,
            residual: f64::NAN,
        })?;
        let s = evd.S();
        let u = evd.U();
        let mut tagged: Vec<(Complex64, usize)> = (0..m).map(|i| (s[i], i)).collect();
        sort_by_magnitude(&mut tagged);
        let beta = h[m][m - 1];
        let ritz_vec = |idx: usize| -> Vec<Complex64> {
            let y: Vec<Complex64> = (0..m).map(|r| u[(r, idx)]).collect();
            let ny = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            y.into_iter().map(|c| c / ny).collect()
        };
        let estimates: Vec<f64> = tagged
            .iter()
            .take(k)
            .map(|&(_, idx)| beta.abs() * ritz_vec(idx)[m - 1].norm())
            .collect();
        worst = estimates.iter().cloned().fold(0.0, f64::max);
        let converged = tagged
            .iter()
            .zip(&estimates)
            .all(|(&(theta, _), &res)| res <= opts.tolerance * theta.norm().max(1.0));

        if converged {
            let mut pairs = Vec::with_capacity(k);
            for &(theta, idx) in tagged.iter().take(k) {
                let y = ritz_vec(idx);
                let mut x = vec![Complex64::new(0.0, 0.0); n];
                for (l, yl) in y.iter().enumerate() {
                    for (xi, vi) in x.iter_mut().zip(&basis[l]) {
                        *xi += yl * vi;
                    }
                }
                let nx = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                x.iter_mut().for_each(|c| *c /= nx);
                let residual = complex_residual(op, theta, &x)?;
                applications += 2;
                pairs.push(RitzPair {
                    value: theta,
                    vector: Some(x),
                    residual: Some(residual),
                });
            }
            return Ok(EigenResult {
                pairs,
                method: EigenMethod::Arnoldi {
                    restarts: restart,
                    applications,
                },
            });
        }

        // Keep the wanted Ritz space plus a margin, never splitting a conjugate pair.
        let mut keep = (k + (m - k) / 2).min(m - 1);
        if keep < m && tagged[keep - 1].0.im != 0.0 {
            let last = tagged[keep - 1].0;
            let partner_inside = tagged[..keep - 1].iter().any(|t| (t.0 - last.conj()).norm() < 1e-12 * last.norm().max(1.0));
            if !partner_inside {
                keep = if keep + 1 < m { keep + 1 } else { keep - 1 };
            }
        }
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(keep);
        for &(theta, idx) in tagged.iter().take(keep) {
            let y = ritz_vec(idx);
            if theta.im == 0.0 {
                cols.push(y.iter().map(|c| c.re).collect());
            } else if theta.im > 0.0 {
                cols.push(y.iter().map(|c| c.re).collect());
                cols.push(y.iter().map(|c| c.im).collect());
            } else if !tagged[..keep].iter().any(|t| t.0.im > 0.0 && (t.0 - theta.conj()).norm() < 1e-12 * theta.norm().max(1.0)) {
                cols.push(y.iter().map(|c| c.re).collect());
                cols.push(y.iter().map(|c| c.im).collect());
            }
        }
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
        for mut c in cols {
            orthogonalize(&q, &mut c);
            let nc = norm(&c);
            if nc > 1e-10 {
                c.iter_mut().for_each(|x| *x /= nc);
                q.push(c);
            }
        }
        let p = q.len().min(m - 1);
        q.truncate(p);

        // Compressed basis V Q and projected matrix Q^T H Q with the residual row.
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        for qc in &q {
            let mut v = vec![0.0; n];
            for (l, ql) in qc.iter().enumerate() {
                if *ql != 0.0 {
                    for (vi, bi) in v.iter_mut().zip(&basis[l]) {
                        *vi += ql * bi;
                    }
                }
            }
            new_basis.push(v);
        }
        new_basis.push(basis[m].clone());
        let hq: Vec<Vec<f64>> = q
            .iter()
            .map(|qc| (0..m).map(|r| (0..m).map(|c| h[r][c] * qc[c]).sum()).collect())
            .collect();
        let mut h_new = vec![vec![0.0; m]; m + 1];
        for a in 0..p {
            for b in 0..p {
                h_new[a][b] = q[a].iter().zip(&hq[b]).map(|(x, y)| x * y).sum();
            }
        }
        for b in 0..p {
            h_new[p][b] = beta * q[b][m - 1];
        }
        h = h_new;
        basis = new_basis;
        start = p;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_restarts,
        residual: worst,
    })
}

/// `||A x - theta x||` for a complex vector, using two real applications.
pub fn complex_residual(op: &dyn LinearOperator, theta: Complex64, x: &[Complex64]) -> Result<f64> {
    let n = x.len();
    let re: Vec<f64> = x.iter().map(|c| c.re).collect();
    let im: Vec<f64> = x.iter().map(|c| c.im).collect();
    let mut are = vec![0.0; n];
    let mut aim = vec![0.0; n];
    op.apply(&re, &mut are)?;
    op.apply(&im, &mut aim)?;
    Ok((0..n)
        .map(|i| (Complex64::new(are[i], aim[i]) - theta * x[i]).norm_sqr())
        .sum::<f64>()
        .sqrt())
}
