//! Many independent line solves over the columns of a row-major array.
//!
//! Coefficients are interleaved so the Thomas recurrences run across all lanes
//! at once with unit-stride access.

use super::perturbed::{PerturbedFactor, RowOp};

#[derive(Debug, Clone, PartialEq)]
pub struct InterleavedFactors {
    width: usize,
    len: usize,
    sub: Vec<f64>,
    inv_pivot: Vec<f64>,
    sup_scaled: Vec<f64>,
    ops: Vec<(usize, RowOp)>,
}

impl InterleavedFactors {
    /// One lane per entry; `None` lanes are left untouched by `solve`.
    pub fn new(factors: &[Option<PerturbedFactor>], len: usize) -> Self {
        let width = factors.len();
        let mut sub = vec![0.0; len * width];
        let mut inv_pivot = vec![1.0; len * width];
        let mut sup_scaled = vec![0.0; len * width];
        let mut ops = Vec::new();
        for (lane, f) in factors.iter().enumerate() {
            let Some(f) = f else { continue };
            assert_eq!(f.len(), len, "lane {lane} has a different length");
            let (a, p, c) = f.thomas().parts();
            for k in 0..len {
                sub[k * width + lane] = a[k];
                inv_pivot[k * width + lane] = p[k];
                sup_scaled[k * width + lane] = c[k];
            }
            ops.extend(f.row_ops().iter().map(|&op| (lane, op)));
        }
        Self {
            width,
            len,
            sub,
            inv_pivot,
            sup_scaled,
            ops,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Solve every lane in place; lane `l` occupies `data[k * width + l]`.
    pub fn solve(&self, data: &mut [f64]) {
        let w = self.width;
        assert_eq!(data.len(), w * self.len);
        if self.len == 0 {
            return;
        }
        for &(lane, op) in &self.ops {
            data[op.target * w + lane] -= op.mult * data[op.source * w + lane];
        }
        for (x, p) in data[..w].iter_mut().zip(&self.inv_pivot[..w]) {
            *x *= p;
        }
        for k in 1..self.len {
            let (prev, cur) = data[(k - 1) * w..(k + 1) * w].split_at_mut(w);
            let a = &self.sub[k * w..(k + 1) * w];
            let p = &self.inv_pivot[k * w..(k + 1) * w];
            for l in 0..w {
                cur[l] = (cur[l] - a[l] * prev[l]) * p[l];
            }
        }
        for k in (0..self.len - 1).rev() {
            let (cur, next) = data[k * w..(k + 2) * w].split_at_mut(w);
            let c = &self.sup_scaled[k * w..(k + 1) * w];
            for l in 0..w {
                cur[l] -= c[l] * next[l];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::perturbed::{PatternBlock, PerturbedSystem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_per_lane_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let len = 12;
        let mut factors = Vec::new();
        for lane in 0..5 {
            if lane == 2 {
                factors.push(None);
                continue;
            }
            let mut rows: Vec<Vec<(usize, f64)>> = (0..len)
                .map(|r| {
                    let mut row = vec![(r, 4.0 + rng.gen::<f64>())];
                    if r > 0 {
                        row.push((r - 1, rng.gen::<f64>() - 0.5));
                    }
                    if r + 1 < len {
                        row.push((r + 1, rng.gen::<f64>() - 0.5));
                    }
                    row
                })
                .collect();
            let mut blocks = Vec::new();
            if lane % 2 == 0 {
                rows[4].push((6, 0.3));
                rows[5].push((3, -0.2));
                blocks.push(PatternBlock::Regular { row: 4 });
            }
            factors.push(Some(PerturbedSystem::from_rows(&rows, blocks).unwrap().factor().unwrap()));
        }
        let batch = InterleavedFactors::new(&factors, len);
        let data: Vec<f64> = (0..len * 5).map(|_| rng.gen::<f64>()).collect();
        let mut out = data.clone();
        batch.solve(&mut out);
        for (lane, f) in factors.iter().enumerate() {
            let mut col: Vec<f64> = (0..len).map(|k| data[k * 5 + lane]).collect();
            if let Some(f) = f {
                f.solve_in_place(&mut col);
            }
            for k in 0..len {
                assert_eq!(out[k * 5 + lane], col[k]);
            }
        }
    }
}
