//! Small dense solves (Gaussian elimination with partial pivoting).

use crate::error::{Error, Result};

/// LU factors of a small dense matrix; also carries the determinant.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
    det: f64,
}

impl DenseLu {
    pub fn new(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let mut lu: Vec<Vec<f64>> = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&r, &s| lu[r][k].abs().total_cmp(&lu[s][k].abs()))
                .unwrap_or(k);
            if p != k {
                lu.swap(p, k);
                perm.swap(p, k);
                det = -det;
            }
            let pivot = lu[k][k];
            det *= pivot;
            if pivot == 0.0 {
                continue;
            }
            for r in k + 1..n {
                let m = lu[r][k] / pivot;
                lu[r][k] = m;
                if m != 0.0 {
                    for c in k + 1..n {
                        lu[r][c] -= m * lu[k][c];
                    }
                }
            }
        }
        Self { lu, perm, det }
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                x[r] -= self.lu[r][c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= self.lu[r][c] * x[c];
            }
            if self.lu[r][r] == 0.0 {
                return Err(Error::ZeroPivot { row: r });
            }
            x[r] /= self.lu[r][r];
        }
        Ok(x)
    }
}

pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    DenseLu::new(a).solve(b)
}

pub fn dense_matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}
