//! Global implicit Euler matrices and the spectrum of the magnifying matrix `M = D^-1 B`.
//!
//! `D u^{k+1} = B u^k + c^k` is the implicit Euler step with interface
//! corrections; the jump data only enter `c^k`, so they drop out of `M`.
//! Boundary rows of `D` are `(1/alpha) e_p` and those of `B` vanish, which makes
//! `M` block upper triangular: its nonzero spectrum is that of the interior block.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use crate::adi::implicit_euler_matrix;
use crate::error::{Error, Result};
use crate::geometry::{Axis, CrossingTopology, Grid2D, Shape};
use crate::linalg::eigen::{dense_leading, leading_eigenvalues, EigenMethod, EigenOptions, FnOperator};
use crate::linalg::krylov::{self, SolveOptions};
use crate::linalg::{CooBuilder, SparseMatrix};
use crate::operators::SpatialOperators;
use crate::problem::ProblemSpec;

/// Moduli at least `1 - UNIT_BAND` count as unit modulus.
pub const UNIT_BAND: f64 = 1e-8;
/// A spectrum is stable when no modulus exceeds `1 + STABILITY_TOLERANCE`.
pub const STABILITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct StabilityMatrices {
    pub d: SparseMatrix,
    pub b: SparseMatrix,
    pub grid: Grid2D,
    pub shape: Shape,
    pub dt: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
}

/// Explicit matrix `(1/alpha) I + dt (B_x + B_y)` on interior rows, zero on the boundary.
pub fn explicit_euler_matrix(spatial: &SpatialOperators, dt: f64) -> SparseMatrix {
    let grid = &spatial.grid;
    let n = grid.n();
    let mut coo = CooBuilder::new(n * n);
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let p = grid.index(i, j);
            coo.push(p, p, spatial.inv_alpha[p]);
        }
    }
    for axis in [Axis::X, Axis::Y] {
        for (r, c, v) in spatial.explicit_entries(axis) {
            coo.push(r, c, dt * v);
        }
    }
    coo.build()
}

pub fn assemble_stability_matrices(
    problem: &ProblemSpec,
    topology: &CrossingTopology,
    dt: f64,
) -> Result<StabilityMatrices> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    let spatial = SpatialOperators::build(problem, topology)?;
    Ok(StabilityMatrices {
        d: implicit_euler_matrix(&spatial, dt),
        b: explicit_euler_matrix(&spatial, dt),
        grid: problem.grid,
        shape: problem.interface.shape(),
        dt,
        alpha_minus: problem.alpha_minus,
        alpha_plus: problem.alpha_plus,
    })
}

/// `D^-1 (B v)` with an iterative inner solve.
pub fn magnify_apply(sm: &StabilityMatrices, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != sm.d.dim() {
        return Err(Error::InvalidInput(format!(
            "vector has length {}, matrices have dimension {}",
            v.len(),
            sm.d.dim()
        )));
    }
    let bv = sm.b.matvec(v);
    if bv.iter().all(|&x| x == 0.0) {
        return Ok(bv);
    }
    Ok(krylov::solve(&sm.d, &bv, &SolveOptions::default())?.0)
}

fn interior_nodes(grid: &Grid2D) -> Vec<usize> {
    let n = grid.n();
    (1..n - 1)
        .flat_map(|j| (1..n - 1).map(move |i| grid.index(i, j)))
        .collect()
}

/// Restriction of a global matrix to interior rows and columns.
fn interior_block(a: &SparseMatrix, grid: &Grid2D) -> SparseMatrix {
    let nodes = interior_nodes(grid);
    let mut map = vec![usize::MAX; a.dim()];
    for (k, &p) in nodes.iter().enumerate() {
        map[p] = k;
    }
    let mut coo = CooBuilder::new(nodes.len());
    for (k, &p) in nodes.iter().enumerate() {
        for (c, v) in a.row(p) {
            if map[c] != usize::MAX {
                coo.push(k, map[c], v);
            }
        }
    }
    coo.build()
}

fn to_faer(a: &SparseMatrix) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(a.dim(), a.dim());
    for r in 0..a.dim() {
        for (c, v) in a.row(r) {
            m[(r, c)] = v;
        }
    }
    m
}

/// Dense `M` on the interior block.
pub fn dense_magnifier(sm: &StabilityMatrices) -> Mat<f64> {
    let d = to_faer(&interior_block(&sm.d, &sm.grid));
    let mut m = to_faer(&interior_block(&sm.b, &sm.grid));
    d.partial_piv_lu().solve_in_place(&mut m);
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// `(eigenvalue, modulus)` sorted by decreasing modulus.
    pub eigenvalues: Vec<(Complex64, f64)>,
    pub unit_count: usize,
    pub max_modulus: f64,
    pub stable: bool,
    pub n: usize,
    pub dt: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub shape: Shape,
    pub dense: bool,
}

/// Leading `k` eigenvalues of `M`.
pub fn spectrum_report(sm: &StabilityMatrices, k: usize, opts: &EigenOptions) -> Result<SpectrumReport> {
    if k == 0 {
        return Err(Error::InvalidInput("need at least one eigenvalue".into()));
    }
    let dim = (sm.grid.n() - 2).pow(2);
    let result = if dim <= opts.dense_threshold {
        dense_leading(&dense_magnifier(sm), k.min(dim))?
    } else {
        let d = interior_block(&sm.d, &sm.grid);
        let b = interior_block(&sm.b, &sm.grid);
        let op = FnOperator::new(dim, |x: &[f64], y: &mut [f64]| -> Result<()> {
            let bx = b.matvec(x);
            let (sol, _) = krylov::solve(&d, &bx, &SolveOptions::default())?;
            y.copy_from_slice(&sol);
            Ok(())
        });
        let forced = EigenOptions {
            dense_threshold: 0,
            ..*opts
        };
        leading_eigenvalues(&op, k.min(dim), &forced)?
    };
    let eigenvalues: Vec<(Complex64, f64)> = result.values().into_iter().map(|z| (z, z.norm())).collect();
    let max_modulus = eigenvalues.first().map_or(0.0, |e| e.1);
    let unit_count = eigenvalues.iter().filter(|e| e.1 >= 1.0 - UNIT_BAND).count();
    Ok(SpectrumReport {
        unit_count,
        max_modulus,
        stable: max_modulus <= 1.0 + STABILITY_TOLERANCE,
        eigenvalues,
        n: sm.grid.n(),
        dt: sm.dt,
        alpha_minus: sm.alpha_minus,
        alpha_plus: sm.alpha_plus,
        shape: sm.shape,
        dense: matches!(result.method, EigenMethod::Dense),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::cases::{CaseId, ExampleCase};
    use crate::geometry::{find_crossings, InterfaceModel};
    use crate::linalg::PatternBlock;
    use crate::problem::{JumpData, SourceTerm};

    fn matrices(problem: &ProblemSpec, dt: f64) -> (StabilityMatrices, SpatialOperators) {
        let topo = find_crossings(&problem.grid, &problem.interface).unwrap();
        (
            assemble_stability_matrices(problem, &topo, dt).unwrap(),
            SpatialOperators::build(problem, &topo).unwrap(),
        )
    }

    #[test]
    fn assembled_matrices_match_matrix_free_products() {
        let mut p = ExampleCase::with_alphas(CaseId::Example5b, 1.0, 1000.0).unwrap().problem(41).unwrap();
        p.jumps = JumpData::zero();
        let dt = 0.1;
        let (sm, ops) = matrices(&p, dt);
        let n = p.grid.n();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let v: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut d_free = vec![0.0; n * n];
            let mut b_free = vec![0.0; n * n];
            let mut with = vec![0.0; n * n];
            let mut without = vec![0.0; n * n];
            for axis in [Axis::X, Axis::Y] {
                let cuts = ops.axis(axis).cuts.len();
                ops.apply_delta(axis, &v, &vec![[0.0; 2]; cuts], &mut without);
                ops.apply_delta(axis, &v, &ops.slot_values(axis, &p.jumps, &v, 0.0), &mut with);
                for q in 0..n * n {
                    d_free[q] -= dt * without[q];
                    b_free[q] += dt * (with[q] - without[q]);
                }
            }
            for j in 0..n {
                for i in 0..n {
                    let q = j * n + i;
                    d_free[q] += ops.inv_alpha[q] * v[q];
                    if p.grid.is_boundary(i, j) {
                        b_free[q] = 0.0;
                    } else {
                        b_free[q] += ops.inv_alpha[q] * v[q];
                    }
                }
            }
            for (m, free) in [(&sm.d, &d_free), (&sm.b, &b_free)] {
                let scale = free.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                for (a, b) in m.matvec(&v).iter().zip(free.iter()) {
                    assert!((a - b).abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn no_interface_spectrum_matches_closed_form() {
        let (n, alpha, dt) = (21, 2.0, 0.05);
        let p = ProblemSpec {
            grid: Grid2D::new(1.0, n).unwrap(),
            interface: InterfaceModel::empty(),
            alpha_minus: alpha,
            alpha_plus: alpha,
            source: SourceTerm::zero(),
            boundary: Arc::new(|_, _, _, _| 0.0),
            initial: Arc::new(|_, _, _, _| 0.0),
            jumps: JumpData::zero(),
        };
        let (sm, _) = matrices(&p, dt);
        let r = spectrum_report(&sm, 3, &EigenOptions::default()).unwrap();
        let h = p.grid.h();
        let s = (std::f64::consts::PI / (2.0 * (n as f64 - 1.0))).sin().powi(2);
        let lowest = 8.0 * s / (h * h);
        let expected = 1.0 / (1.0 + alpha * dt * lowest);
        assert!(r.dense && r.stable && r.unit_count == 0);
        assert!((r.max_modulus - expected).abs() < 1e-10, "{} vs {expected}", r.max_modulus);
    }

    #[test]
    fn arnoldi_path_agrees_with_dense() {
        let p = ExampleCase::new(CaseId::Example5b).problem(24).unwrap();
        let (sm, _) = matrices(&p, 0.01);
        let dense = spectrum_report(&sm, 4, &EigenOptions::default()).unwrap();
        let opts = EigenOptions {
            dense_threshold: 0,
            ..EigenOptions::default()
        };
        let arnoldi = spectrum_report(&sm, 4, &opts).unwrap();
        assert!(dense.dense && !arnoldi.dense);
        assert!((dense.max_modulus - arnoldi.max_modulus).abs() < 1e-8);
        let again = spectrum_report(&sm, 4, &opts).unwrap();
        for (a, b) in arnoldi.eigenvalues.iter().zip(&again.eigenvalues) {
            assert!((a.1 - b.1).abs() < 1e-10);
        }
    }

    #[test]
    fn magnifier_application_matches_dense_matrix() {
        let p = ExampleCase::new(CaseId::Example5a).problem(21).unwrap();
        let (sm, _) = matrices(&p, 0.1);
        let m = dense_magnifier(&sm);
        let n = p.grid.n();
        let nodes = interior_nodes(&p.grid);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut v = vec![0.0; n * n];
        for &q in &nodes {
            v[q] = rng.gen_range(-1.0..1.0);
        }
        let mv = magnify_apply(&sm, &v).unwrap();
        for (r, &q) in nodes.iter().enumerate() {
            let dense: f64 = nodes.iter().enumerate().map(|(c, &qc)| m[(r, c)] * v[qc]).sum();
            assert!((mv[q] - dense).abs() < 1e-8, "{} vs {dense}", mv[q]);
        }
        assert!(magnify_apply(&sm, &[0.0; 3]).is_err());
    }

    #[test]
    fn irregular_row_nonzero_counts() {
        let p = ExampleCase::new(CaseId::Example5b).problem(24).unwrap();
        let (_, ops) = matrices(&p, 1.0);
        let mut counts = BTreeSet::new();
        for axis in [Axis::X, Axis::Y] {
            let ax = ops.axis(axis);
            let explicit = ops.explicit_entries(axis);
            for line in &ax.lines {
                for row in &line.rows {
                    let corner = line
                        .blocks
                        .iter()
                        .any(|b| matches!(b, PatternBlock::Corner { .. }) && b.rows().contains(&row.position));
                    let d_cols: BTreeSet<usize> = row.coeffs.iter().map(|c| c.0).collect();
                    let b_cols: BTreeSet<usize> = explicit.iter().filter(|e| e.0 == row.node).map(|e| e.1).collect();
                    let cuts: BTreeSet<usize> = row.slots.iter().map(|s| s.cut).collect();
                    let transverse = cuts.iter().any(|&c| ax.cuts[c].tangential.aux.len() == 3);
                    let (d, b) = match (corner, transverse) {
                        (true, _) => (5, 12),
                        (false, false) => (4, 6),
                        (false, true) => (4, 9),
                    };
                    assert_eq!((d_cols.len(), b_cols.len()), (d, b), "node {}", row.node);
                    counts.insert((corner, transverse));
                }
            }
        }
        assert!(counts.contains(&(true, false)) && counts.contains(&(false, false)));
    }
}
