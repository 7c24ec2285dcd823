//! Tridiagonal matrices and the Thomas algorithm.

use crate::error::{Error, Result};

/// Pivots smaller than this are treated as zero.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// Band storage: row `i` is `sub[i] * x[i-1] + diag[i] * x[i] + sup[i] * x[i+1]`.
/// `sub[0]` and `sup[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if sub.len() != n || sup.len() != n {
            return Err(Error::InvalidInput(format!(
                "band lengths differ: sub {}, diag {n}, sup {}",
                sub.len(),
                sup.len()
            )));
        }
        if sub.iter().chain(&diag).chain(&sup).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite band entry".into()));
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sub: vec![0.0; n],
            diag: vec![1.0; n],
            sup: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        if col == row {
            self.diag[row]
        } else if col + 1 == row {
            self.sub[row]
        } else if col == row + 1 {
            self.sup[row]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn factor(&self) -> Result<TridiagonalFactor> {
        TridiagonalFactor::new(self)
    }
}

/// Forward-elimination data of the Thomas algorithm, reusable across right-hand sides.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalFactor {
    sub: Vec<f64>,
    inv_pivot: Vec<f64>,
    /// Modified super-diagonal `c'_i = sup_i / pivot_i`.
    sup_scaled: Vec<f64>,
}

impl TridiagonalFactor {
    pub fn new(m: &TridiagonalMatrix) -> Result<Self> {
        let n = m.len();
        let mut inv_pivot = vec![0.0; n];
        let mut sup_scaled = vec![0.0; n];
        for i in 0..n {
            let pivot = if i == 0 {
                m.diag[0]
            } else {
                m.diag[i] - m.sub[i] * sup_scaled[i - 1]
            };
            if !(pivot.abs() > PIVOT_FLOOR) {
                return Err(Error::ZeroPivot { row: i });
            }
            inv_pivot[i] = 1.0 / pivot;
            if i + 1 < n {
                sup_scaled[i] = m.sup[i] * inv_pivot[i];
            }
        }
        Ok(Self {
            sub: m.sub.clone(),
            inv_pivot,
            sup_scaled,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    /// `(sub, inverse pivots, scaled super-diagonal)`
    pub(crate) fn parts(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.sub, &self.inv_pivot, &self.sup_scaled)
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Solve in place; `x` holds the right-hand side on entry.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(x.len(), n);
        if n == 0 {
            return;
        }
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.sup_scaled[i] * x[i + 1];
        }
    }

    /// Strided variant for solving along a column of a row-major field.
    pub fn solve_strided(&self, data: &mut [f64], offset: usize, stride: usize) {
        let n = self.len();
        if n == 0 {
            return;
        }
        let at = |k: usize| offset + k * stride;
        data[at(0)] *= self.inv_pivot[0];
        for i in 1..n {
            data[at(i)] = (data[at(i)] - self.sub[i] * data[at(i - 1)]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            data[at(i)] -= self.sup_scaled[i] * data[at(i + 1)];
        }
    }

    /// Floating-point operations performed by one solve.
    pub fn solve_flops(&self) -> usize {
        let n = self.len();
        if n == 0 {
            0
        } else {
            1 + 3 * (n - 1) + 2 * (n - 1)
        }
    }
}

/// Solve `m x = rhs` by the Thomas algorithm (no pivoting).
pub fn thomas_solve(m: &TridiagonalMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != m.len() {
        return Err(Error::InvalidInput(format!(
            "rhs length {} does not match matrix size {}",
            rhs.len(),
            m.len()
        )));
    }
    let f = m.factor()?;
    let mut x = rhs.to_vec();
    f.solve_in_place(&mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::dense_solve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.0, -2.0, 3.5, 0.25];
        assert_eq!(thomas_solve(&TridiagonalMatrix::identity(4), &b).unwrap(), b);
    }

    #[test]
    fn poisson_with_quadratic_solution() {
        // -u'' = 2 on (0,1), u(0)=u(1)=0 has u = x(1-x); the 3-point scheme is exact.
        let n = 49;
        let h = 1.0 / (n + 1) as f64;
        let m = TridiagonalMatrix::new(vec![-1.0; n], vec![2.0; n], vec![-1.0; n]).unwrap();
        let rhs = vec![2.0 * h * h; n];
        let x = thomas_solve(&m, &rhs).unwrap();
        for (i, xi) in x.iter().enumerate() {
            let s = (i + 1) as f64 * h;
            assert!((xi - s * (1.0 - s)).abs() < 1e-12);
        }
    }

    #[test]
    fn random_dominant_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200;
        let sub: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n).map(|_| 2.5 + rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = TridiagonalMatrix::new(sub, diag, sup).unwrap();
        let x = thomas_solve(&m, &b).unwrap();
        let dense: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
        let y = dense_solve(&dense, &b).unwrap();
        let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let m = TridiagonalMatrix::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(matches!(thomas_solve(&m, &[1.0, 1.0]), Err(Error::ZeroPivot { row: 1 })));
    }

    #[test]
    fn strided_solve_matches_contiguous() {
        let m = TridiagonalMatrix::new(vec![-1.0; 5], vec![3.0; 5], vec![-0.5; 5]).unwrap();
        let f = m.factor().unwrap();
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let mut x = b.to_vec();
        f.solve_in_place(&mut x);
        let mut data = vec![0.0; 15];
        for k in 0..5 {
            data[1 + 3 * k] = b[k];
        }
        f.solve_strided(&mut data, 1, 3);
        for k in 0..5 {
            assert_eq!(data[1 + 3 * k], x[k]);
        }
    }
}
