//! Time stepping: Douglas ADI with interface-corrected line solves, and the
//! fully implicit Euler companion used for checks and stability analysis.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{find_crossings, Axis, Side};
use crate::linalg::batch::InterleavedFactors;
use crate::linalg::dense::DenseLu;
use crate::linalg::krylov::{self, SolveOptions};
use crate::linalg::{CooBuilder, SparseMatrix};
use crate::operators::{row_slot_term, OperatorSet, SpatialOperators};
use crate::problem::{ProblemSpec, SourceTerm, TemporalFn};

/// Largest implicit Euler system solved by dense elimination.
pub const DENSE_EULER_LIMIT: usize = 1024;

/// Nodal field `u[j * n + i]` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub u: Vec<f64>,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Douglas,
    ImplicitEuler,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "douglas" | "adi" => Ok(Scheme::Douglas),
            "euler" | "implicit-euler" => Ok(Scheme::ImplicitEuler),
            _ => Err(Error::InvalidInput(format!("unknown scheme '{s}' (expected douglas or euler)"))),
        }
    }
}

enum SourceCache {
    Pointwise,
    Separable(Vec<(Vec<f64>, TemporalFn)>),
}

enum EulerSolver {
    Dense(DenseLu),
    Sparse(SparseMatrix),
}

/// Implicit matrix `(1/alpha) I - dt (D_xx + D_yy)` with rows `(1/alpha) e_p` on the boundary.
pub fn implicit_euler_matrix(spatial: &SpatialOperators, dt: f64) -> SparseMatrix {
    let grid = &spatial.grid;
    let n = grid.n();
    let mut coo = CooBuilder::new(n * n);
    for j in 0..n {
        for i in 0..n {
            let p = grid.index(i, j);
            coo.push(p, p, spatial.inv_alpha[p]);
        }
    }
    for axis in [Axis::X, Axis::Y] {
        for (r, c, v) in spatial.implicit_entries(axis) {
            coo.push(r, c, -dt * v);
        }
    }
    coo.build()
}

/// Steps one problem forward with cached operators, source profiles and work buffers.
pub struct Stepper {
    problem: ProblemSpec,
    ops: OperatorSet,
    source: SourceCache,
    boundary_nodes: Vec<usize>,
    euler: Option<EulerSolver>,
    solve_options: SolveOptions,
    ustar: Vec<f64>,
    ybuf: Vec<f64>,
    fbuf: Vec<f64>,
    gbuf: Vec<f64>,
    tbuf: Vec<f64>,
    x_batch: InterleavedFactors,
    y_batch: InterleavedFactors,
}

const TRANSPOSE_BLOCK: usize = 32;

/// `dst[i * n + j] = src[j * n + i]`.
fn transpose(src: &[f64], dst: &mut [f64], n: usize) {
    for jb in (0..n).step_by(TRANSPOSE_BLOCK) {
        for ib in (0..n).step_by(TRANSPOSE_BLOCK) {
            for j in jb..(jb + TRANSPOSE_BLOCK).min(n) {
                for i in ib..(ib + TRANSPOSE_BLOCK).min(n) {
                    dst[i * n + j] = src[j * n + i];
                }
            }
        }
    }
}

impl Stepper {
    pub fn new(problem: &ProblemSpec, dt: f64) -> Result<Self> {
        let topology = find_crossings(&problem.grid, &problem.interface)?;
        let spatial = SpatialOperators::build(problem, &topology)?;
        Self::from_operators(problem, OperatorSet::new(spatial, dt)?)
    }

    pub fn from_operators(problem: &ProblemSpec, ops: OperatorSet) -> Result<Self> {
        problem.validate()?;
        let grid = problem.grid;
        if ops.spatial.grid != grid {
            return Err(Error::InvalidInput("operators were assembled on a different grid".into()));
        }
        let n = grid.n();
        let source = match &problem.source {
            SourceTerm::Pointwise(_) => SourceCache::Pointwise,
            SourceTerm::Separable(terms) => SourceCache::Separable(
                terms
                    .iter()
                    .map(|term| {
                        let profile = (0..n * n)
                            .map(|p| {
                                let (i, j) = (p % n, p / n);
                                (term.spatial)(ops.spatial.sides[p], grid.x(i), grid.y(j))
                            })
                            .collect();
                        (profile, Arc::clone(&term.temporal))
                    })
                    .collect(),
            ),
        };
        let x_batch = InterleavedFactors::new(&ops.x_factors, n);
        let y_batch = InterleavedFactors::new(&ops.y_factors, n);
        let boundary_nodes = (0..n * n).filter(|&p| grid.is_boundary(p % n, p / n)).collect();
        Ok(Self {
            problem: problem.clone(),
            ops,
            source,
            boundary_nodes,
            euler: None,
            solve_options: SolveOptions::default(),
            ustar: vec![0.0; n * n],
            ybuf: vec![0.0; n * n],
            fbuf: vec![0.0; n * n],
            gbuf: vec![0.0; n * n],
            tbuf: vec![0.0; n * n],
            x_batch,
            y_batch,
        })
    }

    pub fn dt(&self) -> f64 {
        self.ops.dt
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.ops
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn set_solve_options(&mut self, opts: SolveOptions) {
        self.solve_options = opts;
    }

    /// Initial data sampled at the nodes, with boundary data at `t = 0`.
    pub fn initial_state(&self) -> FieldState {
        let grid = &self.problem.grid;
        let n = grid.n();
        let sides = &self.ops.spatial.sides;
        let mut u: Vec<f64> = (0..n * n)
            .map(|p| (self.problem.initial)(sides[p], grid.x(p % n), grid.y(p / n), 0.0))
            .collect();
        for &p in &self.boundary_nodes {
            u[p] = (self.problem.boundary)(sides[p], grid.x(p % n), grid.y(p / n), 0.0);
        }
        FieldState { u, t: 0.0 }
    }

    fn fill_source(&mut self, t: f64) {
        let grid = self.problem.grid;
        let n = grid.n();
        match &self.source {
            SourceCache::Pointwise => {
                let sides = &self.ops.spatial.sides;
                let problem = &self.problem;
                self.fbuf.par_iter_mut().enumerate().for_each(|(p, f)| {
                    *f = problem.source.eval(sides[p], grid.x(p % n), grid.y(p / n), t);
                });
            }
            SourceCache::Separable(terms) => {
                self.fbuf.iter_mut().for_each(|f| *f = 0.0);
                for (profile, temporal) in terms {
                    let c = temporal(t);
                    if c != 0.0 {
                        self.fbuf.iter_mut().zip(profile).for_each(|(f, s)| *f += s * c);
                    }
                }
            }
        }
    }

    fn fill_boundary(&mut self, t: f64) {
        let grid = &self.problem.grid;
        let n = grid.n();
        let sides = &self.ops.spatial.sides;
        for &p in &self.boundary_nodes {
            self.gbuf[p] = (self.problem.boundary)(sides[p], grid.x(p % n), grid.y(p / n), t);
        }
    }

    fn check_state(&self, state: &FieldState) -> Result<()> {
        let nn = self.problem.grid.node_count();
        if state.u.len() != nn {
            return Err(Error::InvalidInput(format!(
                "field has {} values, grid has {nn} nodes",
                state.u.len()
            )));
        }
        Ok(())
    }

    /// One Douglas ADI step, overwriting `state`.
    pub fn douglas_step_in_place(&mut self, state: &mut FieldState) -> Result<()> {
        self.check_state(state)?;
        let dt = self.ops.dt;
        let tk = state.t;
        let t1 = tk + dt;
        let grid = self.problem.grid;
        let n = grid.n();
        let inv_h2 = 1.0 / (grid.h() * grid.h());
        let spatial = &self.ops.spatial;
        let jumps = &self.problem.jumps;

        let slots_x = spatial.slot_values(Axis::X, jumps, &state.u, tk);
        let slots_y = spatial.slot_values(Axis::Y, jumps, &state.u, tk);
        spatial.apply_delta(Axis::Y, &state.u, &slots_y, &mut self.ybuf);
        self.fill_source(t1);
        self.fill_boundary(t1);

        let spatial = &self.ops.spatial;
        let u = &state.u;
        let (ybuf, fbuf, gbuf) = (&self.ybuf, &self.fbuf, &self.gbuf);
        let ia = &spatial.inv_alpha;

        // Sweep 1: x-lines. Boundary values of the intermediate field follow from the
        // second sweep evaluated on the boundary columns.
        self.ustar.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            if j == 0 || j + 1 == n {
                row.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
            for i in [0, n - 1] {
                let d = |jj: usize| gbuf[jj * n + i] - u[jj * n + i];
                let lap = (d(j - 1) - 2.0 * d(j) + d(j + 1)) * inv_h2;
                row[i] = gbuf[j * n + i] - dt * lap / ia[j * n + i];
            }
            let r = j * n + 1..(j + 1) * n - 1;
            row[1..n - 1]
                .iter_mut()
                .zip(&ia[r.clone()])
                .zip(&u[r.clone()])
                .zip(&fbuf[r.clone()])
                .zip(&ybuf[r])
                .for_each(|((((v, a), u), f), y)| *v = a * (u + dt * f) + dt * y);
            for r in &spatial.x.lines[j].rows {
                row[r.position] += dt * row_slot_term(r, &slots_x);
            }
        });
        transpose(&self.ustar, &mut self.tbuf, n);
        self.x_batch.solve(&mut self.tbuf);
        transpose(&self.tbuf, &mut self.ustar, n);

        // Sweep 2: y-lines, all columns at once.
        let (ybuf, gbuf, ia) = (&self.ybuf, &self.gbuf, &self.ops.spatial.inv_alpha);
        let spatial = &self.ops.spatial;
        let ustar = &self.ustar;
        let next = &mut state.u;
        next.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            if j == 0 || j + 1 == n {
                row.copy_from_slice(&gbuf[j * n..(j + 1) * n]);
                return;
            }
            row[0] = gbuf[j * n];
            row[n - 1] = gbuf[j * n + n - 1];
            let r = j * n + 1..(j + 1) * n - 1;
            row[1..n - 1]
                .iter_mut()
                .zip(&ia[r.clone()])
                .zip(&ustar[r.clone()])
                .zip(&ybuf[r])
                .for_each(|(((v, a), s), y)| *v = a * s - dt * y);
        });
        for r in spatial.y.irregular_rows() {
            next[r.node] += dt * row_slot_term(r, &slots_y);
        }
        self.y_batch.solve(next);
        state.t = t1;
        Ok(())
    }

    pub fn douglas_step(&mut self, state: &FieldState) -> Result<FieldState> {
        let mut next = state.clone();
        self.douglas_step_in_place(&mut next)?;
        Ok(next)
    }

    /// Right-hand side of the implicit Euler system for the step `t -> t + dt`.
    pub fn implicit_euler_rhs(&mut self, state: &FieldState) -> Result<Vec<f64>> {
        self.check_state(state)?;
        let dt = self.ops.dt;
        let tk = state.t;
        self.fill_source(tk + dt);
        self.fill_boundary(tk + dt);
        let spatial = &self.ops.spatial;
        let jumps = &self.problem.jumps;
        let ia = &spatial.inv_alpha;
        let mut b: Vec<f64> = (0..state.u.len())
            .map(|p| ia[p] * (state.u[p] + dt * self.fbuf[p]))
            .collect();
        for axis in [Axis::X, Axis::Y] {
            let slots = spatial.slot_values(axis, jumps, &state.u, tk);
            for r in spatial.axis(axis).irregular_rows() {
                b[r.node] += dt * row_slot_term(r, &slots);
            }
        }
        for &p in &self.boundary_nodes {
            b[p] = ia[p] * self.gbuf[p];
        }
        Ok(b)
    }

    /// One fully implicit Euler step with the same interface corrections.
    pub fn implicit_euler_step(&mut self, state: &FieldState) -> Result<FieldState> {
        let b = self.implicit_euler_rhs(state)?;
        if self.euler.is_none() {
            let a = implicit_euler_matrix(&self.ops.spatial, self.ops.dt);
            self.euler = Some(if a.dim() <= DENSE_EULER_LIMIT {
                EulerSolver::Dense(DenseLu::new(&a.to_dense()))
            } else {
                EulerSolver::Sparse(a)
            });
        }
        let mut u = match self.euler.as_ref().expect("solver initialised above") {
            EulerSolver::Dense(lu) => lu.solve(&b)?,
            EulerSolver::Sparse(a) => krylov::solve(a, &b, &self.solve_options)?.0,
        };
        for &p in &self.boundary_nodes {
            u[p] = self.gbuf[p];
        }
        Ok(FieldState {
            u,
            t: state.t + self.ops.dt,
        })
    }

    pub fn step(&mut self, scheme: Scheme, state: &mut FieldState) -> Result<()> {
        match scheme {
            Scheme::Douglas => self.douglas_step_in_place(state),
            Scheme::ImplicitEuler => {
                *state = self.implicit_euler_step(state)?;
                Ok(())
            }
        }
    }
}

/// One Douglas step with freshly assembled operators.
pub fn douglas_step(problem: &ProblemSpec, ops: &OperatorSet, state: &FieldState) -> Result<FieldState> {
    Stepper::from_operators(problem, ops.clone())?.douglas_step(state)
}

/// One implicit Euler step with freshly assembled operators.
pub fn implicit_euler_step(problem: &ProblemSpec, state: &FieldState, dt: f64) -> Result<FieldState> {
    Stepper::new(problem, dt)?.implicit_euler_step(state)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepDiagnostics {
    /// Full steps of the nominal size.
    pub steps: usize,
    /// Size of the closing partial step, if one was needed.
    pub partial_step: Option<f64>,
    /// `max |u^{k+1} - u^k|` per step, when requested.
    pub increments: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdvanceOptions {
    pub record_increments: bool,
}

/// March from the initial data to `t_final`. A remainder shorter than `dt` is
/// taken as one extra step with operators assembled for that step size.
pub fn advance(
    problem: &ProblemSpec,
    scheme: Scheme,
    dt: f64,
    t_final: f64,
    opts: AdvanceOptions,
) -> Result<(FieldState, StepDiagnostics)> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput(format!("final time must be non-negative, got {t_final}")));
    }
    let mut stepper = Stepper::new(problem, dt)?;
    let mut state = stepper.initial_state();
    let ratio = t_final / dt;
    let mut steps = ratio.floor() as usize;
    if ratio - steps as f64 > 1.0 - 1e-9 {
        steps += 1;
    }
    let mut diag = StepDiagnostics::default();
    let mut prev = opts.record_increments.then(|| state.u.clone());
    let record = |state: &FieldState, prev: &mut Option<Vec<f64>>, diag: &mut StepDiagnostics| {
        if let Some(p) = prev.as_mut() {
            let inc = state.u.iter().zip(p.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            diag.increments.push(inc);
            p.copy_from_slice(&state.u);
        }
    };
    for k in 0..steps {
        stepper.step(scheme, &mut state)?;
        // Accumulating t would drift; pin it to the step count.
        state.t = (k + 1) as f64 * dt;
        diag.steps += 1;
        record(&state, &mut prev, &mut diag);
    }
    let rest = t_final - state.t;
    if rest > 1e-12 * t_final.max(1.0) {
        let mut last = Stepper::new(problem, rest)?;
        last.step(scheme, &mut state)?;
        state.t = t_final;
        diag.partial_step = Some(rest);
        record(&state, &mut prev, &mut diag);
    }
    Ok((state, diag))
}

/// Side of each node, for callers that evaluate piecewise data on the grid.
pub fn node_sides(problem: &ProblemSpec) -> Vec<Side> {
    crate::geometry::classify_nodes(&problem.grid, &problem.interface)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::cases::{CaseId, ExampleCase};
    use crate::geometry::{Grid2D, InterfaceModel};
    use crate::problem::JumpData;

    fn plain_problem(n: usize, alpha: f64) -> ProblemSpec {
        ProblemSpec {
            grid: Grid2D::new(1.0, n).unwrap(),
            interface: InterfaceModel::empty(),
            alpha_minus: alpha,
            alpha_plus: alpha,
            source: SourceTerm::Pointwise(Arc::new(|_, x, y, t| (x + 2.0 * y).sin() * (1.0 + t))),
            boundary: Arc::new(|_, x, y, t| (x - y).cos() + t),
            initial: Arc::new(|_, x, y, _| x * y),
            jumps: JumpData::zero(),
        }
    }

    fn random_state(n: usize, seed: u64) -> FieldState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FieldState {
            u: (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            t: 0.2,
        }
    }

    fn second_diff(u: &[f64], p: usize, stride: usize, inv_h2: f64) -> f64 {
        (u[p - stride] - 2.0 * u[p] + u[p + stride]) * inv_h2
    }

    #[test]
    fn douglas_step_satisfies_factored_identity() {
        let (n, alpha, dt) = (17, 2.0, 0.01);
        let p = plain_problem(n, alpha);
        let mut stepper = Stepper::new(&p, dt).unwrap();
        let uk = random_state(n, 11);
        let u1 = stepper.douglas_step(&uk).unwrap();
        let g = &p.grid;
        let inv_h2 = 1.0 / (g.h() * g.h());
        let w: Vec<f64> = u1.u.iter().zip(&uk.u).map(|(a, b)| a - b).collect();
        // delta_yy w on every row with an interior y index, boundary columns included.
        let mut wyy = vec![0.0; n * n];
        for j in 1..n - 1 {
            for i in 0..n {
                wyy[j * n + i] = second_diff(&w, j * n + i, n, inv_h2);
            }
        }
        let ia = 1.0 / alpha;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let q = j * n + i;
                let lap = second_diff(&u1.u, q, 1, inv_h2) + second_diff(&u1.u, q, n, inv_h2);
                let cross = second_diff(&wyy, q, 1, inv_h2);
                let lhs = ia * u1.u[q] - dt * lap + alpha * dt * dt * cross;
                let f = p.source.eval(Side::Plus, g.x(i), g.y(j), uk.t + dt);
                let rhs = ia * uk.u[q] + dt * ia * f;
                worst = worst.max((lhs - rhs).abs());
                scale = scale.max(rhs.abs()).max((dt * lap).abs());
            }
        }
        assert!(worst <= 1e-12 * scale, "residual {worst:e}, scale {scale:e}");
        for j in 0..n {
            for i in 0..n {
                if g.is_boundary(i, j) {
                    let b = (p.boundary)(Side::Plus, g.x(i), g.y(j), uk.t + dt);
                    assert_eq!(u1.u[j * n + i], b);
                }
            }
        }
    }

    #[test]
    fn constant_state_is_steady_across_interface() {
        let p = ProblemSpec {
            grid: Grid2D::new(0.99, 31).unwrap(),
            interface: InterfaceModel::polar_leaf(4, 0.1).unwrap(),
            alpha_minus: 1.0,
            alpha_plus: 10.0,
            source: SourceTerm::zero(),
            boundary: Arc::new(|_, _, _, _| 2.5),
            initial: Arc::new(|_, _, _, _| 2.5),
            jumps: JumpData::zero(),
        };
        for scheme in [Scheme::Douglas, Scheme::ImplicitEuler] {
            let (state, diag) = advance(&p, scheme, 0.05, 0.5, AdvanceOptions::default()).unwrap();
            assert_eq!(diag.steps, 10);
            assert!(state.u.iter().all(|v| (v - 2.5).abs() < 1e-12));
        }
    }

    #[test]
    fn douglas_and_euler_differ_at_second_order_per_step() {
        let p = ProblemSpec {
            initial: Arc::new(|_, x, y, _| (x - y).cos()),
            ..plain_problem(21, 2.0)
        };
        let mut diffs = Vec::new();
        for dt in [1e-4, 5e-5] {
            let mut s = Stepper::new(&p, dt).unwrap();
            let u0 = s.initial_state();
            let a = s.douglas_step(&u0).unwrap();
            let b = s.implicit_euler_step(&u0).unwrap();
            diffs.push(a.u.iter().zip(&b.u).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
        }
        let order = (diffs[0] / diffs[1]).log2();
        assert!(order > 1.8, "order {order}, differences {diffs:?}");
    }

    #[test]
    fn fields_linear_in_space_and_time_are_reproduced() {
        let (a, b, c) = (0.7, -1.2, 0.4);
        let exact = move |x: f64, y: f64, t: f64| a * x + b * y + c * t;
        let p = ProblemSpec {
            source: SourceTerm::Pointwise(Arc::new(move |_, _, _, _| c)),
            boundary: Arc::new(move |_, x, y, t| exact(x, y, t)),
            initial: Arc::new(move |_, x, y, _| exact(x, y, 0.0)),
            ..plain_problem(13, 0.5)
        };
        for scheme in [Scheme::Douglas, Scheme::ImplicitEuler] {
            let (state, _) = advance(&p, scheme, 0.05, 0.5, AdvanceOptions::default()).unwrap();
            let g = &p.grid;
            for (q, v) in state.u.iter().enumerate() {
                let e = exact(g.x(q % 13), g.y(q / 13), 0.5);
                assert!((v - e).abs() < 1e-12, "{scheme:?}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn parallel_sweeps_are_bit_identical() {
        let p = ExampleCase::new(CaseId::Example5b).problem(41).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| advance(&p, Scheme::Douglas, 1e-3, 0.02, AdvanceOptions::default()).unwrap().0)
        };
        let a = run(1);
        let b = run(4);
        assert!(a.u.iter().zip(&b.u).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn reused_operators_give_the_same_step() {
        let p = ExampleCase::new(CaseId::Example2).problem(21).unwrap();
        let topo = find_crossings(&p.grid, &p.interface).unwrap();
        let ops = crate::operators::assemble_operators(&p, &topo, 1e-3).unwrap();
        let mut fresh = Stepper::new(&p, 1e-3).unwrap();
        let u0 = fresh.initial_state();
        let a = fresh.douglas_step(&u0).unwrap();
        let b = douglas_step(&p, &ops, &u0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_final_time_returns_initial_data() {
        let p = ExampleCase::new(CaseId::Example4).problem(21).unwrap();
        let (state, diag) = advance(&p, Scheme::Douglas, 0.1, 0.0, AdvanceOptions::default()).unwrap();
        assert_eq!(diag.steps, 0);
        assert_eq!(state, Stepper::new(&p, 0.1).unwrap().initial_state());
    }

    #[test]
    fn remainder_taken_as_partial_step() {
        let p = ExampleCase::new(CaseId::Example4).problem(21).unwrap();
        let opts = AdvanceOptions { record_increments: true };
        let (state, diag) = advance(&p, Scheme::Douglas, 0.3, 1.0, opts).unwrap();
        assert_eq!(diag.steps, 3);
        assert!((diag.partial_step.unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(diag.increments.len(), 4);
        assert_eq!(state.t, 1.0);
    }

    #[test]
    fn wrong_field_length_rejected() {
        let p = plain_problem(9, 1.0);
        let mut s = Stepper::new(&p, 0.1).unwrap();
        let bad = FieldState { u: vec![0.0; 10], t: 0.0 };
        assert!(matches!(s.douglas_step(&bad), Err(Error::InvalidInput(_))));
        assert!("adi".parse::<Scheme>().is_ok() && "rk4".parse::<Scheme>().is_err());
    }
}
