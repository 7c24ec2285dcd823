//! Tridiagonal systems with a few out-of-band entries left behind by interface corrections.
//!
//! Two perturbation shapes occur. A regular block spans rows `r, r+1` with extra
//! entries at `(r, r+2)` and `(r+1, r-1)`. A corner block spans rows `a, a+1, a+2`
//! with extra entries at `(a, a+2)`, `(a, a+3)`, `(a+1, a-1)`, `(a+1, a+3)`,
//! `(a+2, a-1)` and `(a+2, a)`.

use std::collections::BTreeMap;

use super::dense::DenseLu;
use super::tridiag::{TridiagonalFactor, TridiagonalMatrix, PIVOT_FLOOR};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternBlock {
    Regular { row: usize },
    Corner { row: usize },
}

impl PatternBlock {
    pub fn rows(&self) -> std::ops::Range<usize> {
        match *self {
            PatternBlock::Regular { row } => row..row + 2,
            PatternBlock::Corner { row } => row..row + 3,
        }
    }

    fn allows(&self, row: usize, col: usize) -> bool {
        match *self {
            PatternBlock::Regular { row: r } => {
                (row == r && col == r + 2) || (row == r + 1 && col + 1 == r)
            }
            PatternBlock::Corner { row: a } => {
                (row == a && (col == a + 2 || col == a + 3))
                    || (row == a + 1 && (col + 1 == a || col == a + 3))
                    || (row == a + 2 && (col + 1 == a || col == a))
            }
        }
    }

    fn fits(&self, n: usize) -> bool {
        match *self {
            PatternBlock::Regular { row } => row >= 1 && row + 2 < n,
            PatternBlock::Corner { row } => row >= 1 && row + 3 < n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutOfBand {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Tridiagonal core plus declared out-of-band entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedSystem {
    tri: TridiagonalMatrix,
    extras: Vec<OutOfBand>,
    blocks: Vec<PatternBlock>,
}

impl PerturbedSystem {
    pub fn new(tri: TridiagonalMatrix, blocks: Vec<PatternBlock>, extras: Vec<OutOfBand>) -> Result<Self> {
        let n = tri.len();
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b.rows().start);
        for (k, b) in blocks.iter().enumerate() {
            if !b.fits(n) {
                return Err(Error::InvalidInput(format!(
                    "perturbation block at rows {:?} does not fit a system of size {n}",
                    b.rows()
                )));
            }
            if k > 0 && blocks[k - 1].rows().end > b.rows().start {
                return Err(Error::InvalidInput(format!(
                    "perturbation blocks overlap at row {}",
                    b.rows().start
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &extras {
            let owner = blocks.iter().find(|b| b.rows().contains(&e.row));
            if !owner.is_some_and(|b| b.allows(e.row, e.col)) || !seen.insert((e.row, e.col)) {
                return Err(Error::PatternMismatch { row: e.row, col: e.col });
            }
            if !e.value.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite entry at ({}, {})", e.row, e.col)));
            }
        }
        Ok(Self { tri, extras, blocks })
    }

    /// Split sparse rows into band and out-of-band parts; duplicates are summed.
    pub fn from_rows(rows: &[Vec<(usize, f64)>], blocks: Vec<PatternBlock>) -> Result<Self> {
        let n = rows.len();
        let mut tri = TridiagonalMatrix {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
        };
        let mut extra: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                if j >= n {
                    return Err(Error::PatternMismatch { row: i, col: j });
                }
                if j == i {
                    tri.diag[i] += v;
                } else if j + 1 == i {
                    tri.sub[i] += v;
                } else if j == i + 1 {
                    tri.sup[i] += v;
                } else {
                    *extra.entry((i, j)).or_insert(0.0) += v;
                }
            }
        }
        let extras = extra
            .into_iter()
            .map(|((row, col), value)| OutOfBand { row, col, value })
            .collect();
        Self::new(tri, blocks, extras)
    }

    pub fn len(&self) -> usize {
        self.tri.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tri.is_empty()
    }

    pub fn tridiagonal(&self) -> &TridiagonalMatrix {
        &self.tri
    }

    pub fn extras(&self) -> &[OutOfBand] {
        &self.extras
    }

    pub fn blocks(&self) -> &[PatternBlock] {
        &self.blocks
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let band = self.tri.get(row, col);
        band + self
            .extras
            .iter()
            .filter(|e| e.row == row && e.col == col)
            .map(|e| e.value)
            .sum::<f64>()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.tri.matvec(x);
        for e in &self.extras {
            y[e.row] += e.value * x[e.col];
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.tri.get(i, j)).collect()).collect();
        for e in &self.extras {
            a[e.row][e.col] += e.value;
        }
        a
    }

    /// Eliminate the out-of-band entries by row operations and factor the
    /// remaining tridiagonal matrix.
    pub fn factor(&self) -> Result<PerturbedFactor> {
        let mut tri = self.tri.clone();
        let mut ops = Vec::new();
        let mut flops = 0;
        for block in &self.blocks {
            match *block {
                PatternBlock::Regular { row } => {
                    flops += self.reduce_regular(&mut tri, row, &mut ops)?;
                }
                PatternBlock::Corner { row } => {
                    flops += self.reduce_corner(&mut tri, row, &mut ops)?;
                }
            }
        }
        let thomas = TridiagonalFactor::new(&tri)?;
        Ok(PerturbedFactor {
            ops,
            factor_flops: flops,
            thomas,
        })
    }

    fn window(&self, row: usize, base: usize, width: usize) -> [f64; 5] {
        let mut w = [0.0; 5];
        for (k, slot) in w.iter_mut().enumerate().take(width) {
            *slot = self.get(row, base + k);
        }
        w
    }

    fn reduce_regular(&self, tri: &mut TridiagonalMatrix, r: usize, ops: &mut Vec<RowOp>) -> Result<usize> {
        // Window columns r-1 .. r+2.
        let base = r - 1;
        let mut top = self.window(r, base, 4);
        let mut bot = self.window(r + 1, base, 4);

        // Kill (r+1, r-1) using row r, then (r, r+2) using the updated row r+1.
        let m1 = ratio(bot[0], top[0], r)?;
        axpy_row(&mut bot, &top, m1, 4);
        bot[0] = 0.0;
        ops.push(RowOp { target: r + 1, source: r, mult: m1 });

        let m2 = ratio(top[3], bot[3], r + 1)?;
        axpy_row(&mut top, &bot, m2, 4);
        top[3] = 0.0;
        ops.push(RowOp { target: r, source: r + 1, mult: m2 });

        tri.sub[r] = top[0];
        tri.diag[r] = top[1];
        tri.sup[r] = top[2];
        tri.sub[r + 1] = bot[1];
        tri.diag[r + 1] = bot[2];
        tri.sup[r + 1] = bot[3];
        Ok(2 * (1 + 2 * 4))
    }

    fn reduce_corner(&self, tri: &mut TridiagonalMatrix, a: usize, ops: &mut Vec<RowOp>) -> Result<usize> {
        // Window columns a-1 .. a+3; rows a, b = a+1, c = a+2.
        let base = a - 1;
        let (b, c) = (a + 1, a + 2);
        let mut ra = self.window(a, base, 5);
        let mut rb = self.window(b, base, 5);
        let mut rc = self.window(c, base, 5);

        // 1-2: clear column a-1 from rows c and b with row a.
        let m = ratio(rc[0], ra[0], a)?;
        axpy_row(&mut rc, &ra, m, 5);
        rc[0] = 0.0;
        ops.push(RowOp { target: c, source: a, mult: m });
        let m = ratio(rb[0], ra[0], a)?;
        axpy_row(&mut rb, &ra, m, 5);
        rb[0] = 0.0;
        ops.push(RowOp { target: b, source: a, mult: m });
        // 3: clear column a from row c with row b.
        let m = ratio(rc[1], rb[1], b)?;
        axpy_row(&mut rc, &rb, m, 5);
        rc[1] = 0.0;
        ops.push(RowOp { target: c, source: b, mult: m });
        // 4-5: clear column a+3 from rows b and a with row c.
        let m = ratio(rb[4], rc[4], c)?;
        axpy_row(&mut rb, &rc, m, 5);
        rb[4] = 0.0;
        ops.push(RowOp { target: b, source: c, mult: m });
        let m = ratio(ra[4], rc[4], c)?;
        axpy_row(&mut ra, &rc, m, 5);
        ra[4] = 0.0;
        ops.push(RowOp { target: a, source: c, mult: m });
        // 6: clear column a+2 from row a with row b.
        let m = ratio(ra[3], rb[3], b)?;
        axpy_row(&mut ra, &rb, m, 5);
        ra[3] = 0.0;
        ops.push(RowOp { target: a, source: b, mult: m });

        tri.sub[a] = ra[0];
        tri.diag[a] = ra[1];
        tri.sup[a] = ra[2];
        tri.sub[b] = rb[1];
        tri.diag[b] = rb[2];
        tri.sup[b] = rb[3];
        tri.sub[c] = rc[2];
        tri.diag[c] = rc[3];
        tri.sup[c] = rc[4];
        Ok(6 * (1 + 2 * 5))
    }
}

fn ratio(num: f64, pivot: f64, row: usize) -> Result<f64> {
    if num == 0.0 {
        return Ok(0.0);
    }
    if !(pivot.abs() > PIVOT_FLOOR) {
        return Err(Error::ZeroPivot { row });
    }
    Ok(num / pivot)
}

fn axpy_row(target: &mut [f64; 5], source: &[f64; 5], mult: f64, width: usize) {
    for k in 0..width {
        target[k] -= mult * source[k];
    }
}

/// `rhs[target] -= mult * rhs[source]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowOp {
    pub target: usize,
    pub source: usize,
    pub mult: f64,
}

/// Recorded row operations plus the Thomas factors of the reduced matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedFactor {
    ops: Vec<RowOp>,
    factor_flops: usize,
    thomas: TridiagonalFactor,
}

impl PerturbedFactor {
    pub fn len(&self) -> usize {
        self.thomas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thomas.is_empty()
    }

    pub fn row_ops(&self) -> &[RowOp] {
        &self.ops
    }

    pub(crate) fn thomas(&self) -> &TridiagonalFactor {
        &self.thomas
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        for op in &self.ops {
            x[op.target] -= op.mult * x[op.source];
        }
        self.thomas.solve_in_place(x);
    }

    pub fn solve_strided(&self, data: &mut [f64], offset: usize, stride: usize) {
        for op in &self.ops {
            data[offset + op.target * stride] -= op.mult * data[offset + op.source * stride];
        }
        self.thomas.solve_strided(data, offset, stride);
    }

    /// Arithmetic performed by factoring plus one solve.
    pub fn flops(&self) -> usize {
        self.factor_flops + 2 * self.ops.len() + self.thomas.solve_flops() + 3 * self.len()
    }
}

/// Row-operation reduction followed by a single Thomas solve.
pub fn reduce_and_solve(p: &PerturbedSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    check_len(p, rhs)?;
    let f = p.factor()?;
    let mut x = rhs.to_vec();
    f.solve_in_place(&mut x);
    Ok(x)
}

fn check_len(p: &PerturbedSystem, rhs: &[f64]) -> Result<()> {
    if rhs.len() != p.len() {
        return Err(Error::InvalidInput(format!(
            "rhs length {} does not match system size {}",
            rhs.len(),
            p.len()
        )));
    }
    Ok(())
}

/// Split `A = T + P Q^T` for a system with regular blocks only.
/// `P` and `Q` are returned column by column (one column per block).
pub fn woodbury_factors(p: &PerturbedSystem) -> Result<(TridiagonalMatrix, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = p.len();
    let mut t = p.tri.clone();
    let mut pc = Vec::new();
    let mut qc = Vec::new();
    for block in &p.blocks {
        let r = match *block {
            PatternBlock::Regular { row } => row,
            PatternBlock::Corner { row } => return Err(Error::PatternMismatch { row, col: row + 2 }),
        };
        let lower = p.get(r + 1, r - 1);
        let upper = p.get(r, r + 2);
        let mut pcol = vec![0.0; n];
        pcol[r] = 1.0;
        pcol[r + 1] = 1.0;
        let mut qcol = vec![0.0; n];
        qcol[r - 1] = lower;
        qcol[r + 2] = upper;
        // P Q^T also deposits `lower` at (r, r-1) and `upper` at (r+1, r+2); T absorbs them.
        t.sub[r] -= lower;
        t.sup[r + 1] -= upper;
        pc.push(pcol);
        qc.push(qcol);
    }
    Ok((t, pc, qc))
}

/// Woodbury identity with Thomas solves on the tridiagonal part.
pub fn woodbury_solve(p: &PerturbedSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    check_len(p, rhs)?;
    let (t, pc, qc) = woodbury_factors(p)?;
    let tf = TridiagonalFactor::new(&t)?;
    let mut z = rhs.to_vec();
    tf.solve_in_place(&mut z);
    let k = pc.len();
    if k == 0 {
        return Ok(z);
    }
    let zp: Vec<Vec<f64>> = pc
        .iter()
        .map(|col| {
            let mut v = col.clone();
            tf.solve_in_place(&mut v);
            v
        })
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let cap: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { 1.0 } else { 0.0 } + dot(&qc[i], &zp[j]))
                .collect()
        })
        .collect();
    let scale = cap.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let lu = DenseLu::new(&cap);
    if lu.det().abs() <= 1e-14 * scale.powi(k as i32) {
        return Err(Error::SingularCapacitance);
    }
    let qz: Vec<f64> = qc.iter().map(|q| dot(q, &z)).collect();
    let w = lu.solve(&qz).map_err(|_| Error::SingularCapacitance)?;
    for (j, wj) in w.iter().enumerate() {
        for (zi, zpi) in z.iter_mut().zip(&zp[j]) {
            *zi -= wj * zpi;
        }
    }
    Ok(z)
}
