//! Interface-corrected second-difference operators and their line systems.
//!
//! Away from the interface `delta` is the three-point second difference along a
//! grid line. At an irregular node the value across the interface is replaced by
//! a fictitious value, which brings in extra same-line unknowns (kept in the
//! implicit part) and the jump data of the nearby cuts. The flux jump of a cut
//! contains a tangential derivative that is taken from the previous time level,
//! so every operator splits into
//! `delta u^{k+1} = D u^{k+1} + B u^k + Phi^k`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{classify_nodes, Axis, CrossingGroup, CrossingTopology, Grid2D, LineCrossing, Side};
use crate::linalg::perturbed::{PatternBlock, PerturbedFactor, PerturbedSystem};
use crate::mib::fictitious::{solve_corner_fictitious, solve_regular_fictitious, FictitiousStencil};
use crate::mib::jump::{FluxJumpCoefficients, InterfaceValues};
use crate::mib::tangential::{tangential_stencil_with_fallback, TangentialRoute, TangentialStencil};
use crate::problem::{JumpData, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    /// Function jump `[u]`.
    Phi,
    /// Per-axis flux jump.
    Flux,
}

/// One interface cut with everything needed to evaluate its jump slots.
#[derive(Debug, Clone, PartialEq)]
pub struct CutRecord {
    pub crossing: LineCrossing,
    pub point: (f64, f64),
    pub tangential: TangentialStencil,
    pub flux: FluxJumpCoefficients,
}

impl CutRecord {
    pub fn interface_values(&self, jumps: &JumpData, t: f64) -> InterfaceValues {
        let (x, y) = self.point;
        InterfaceValues {
            phi: (jumps.phi)(x, y, t),
            psi: (jumps.psi)(x, y, t),
            phi_tau: (jumps.phi_tau)(x, y, t),
        }
    }

    /// `(phi, flux)` with the tangential derivative taken from `u`.
    pub fn slot_values(&self, jumps: &JumpData, u: &[f64], t: f64) -> [f64; 2] {
        let v = self.interface_values(jumps, t);
        [v.phi, self.flux.eval(&v, self.tangential.apply(u))]
    }

    /// The part of the flux slot that does not depend on the field.
    pub fn slot_values_without_field(&self, jumps: &JumpData, t: f64) -> [f64; 2] {
        let v = self.interface_values(jumps, t);
        [v.phi, self.flux.eval(&v, 0.0)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRef {
    /// Index into the axis' cut list.
    pub cut: usize,
    pub kind: SlotKind,
    pub coef: f64,
}

/// A second-difference row changed by interface corrections.
#[derive(Debug, Clone, PartialEq)]
pub struct IrregularRow {
    /// Position along the line.
    pub position: usize,
    /// Flat node index.
    pub node: usize,
    /// `(line position, coefficient)`; the implicit part of `delta` at this node.
    pub coeffs: Vec<(usize, f64)>,
    pub slots: Vec<SlotRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineOperator {
    pub axis: Axis,
    pub line: usize,
    pub rows: Vec<IrregularRow>,
    pub blocks: Vec<PatternBlock>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisOperators {
    pub axis: Axis,
    /// One entry per line index; boundary lines carry no rows.
    pub lines: Vec<LineOperator>,
    pub cuts: Vec<CutRecord>,
}

impl AxisOperators {
    pub fn irregular_rows(&self) -> impl Iterator<Item = &IrregularRow> {
        self.lines.iter().flat_map(|l| l.rows.iter())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssemblyDiagnostics {
    pub regular_cuts: usize,
    pub corner_pairs: usize,
    /// Cuts whose tangential derivative had to come from the minus side.
    pub minus_side_tangents: usize,
    /// Cuts whose tangential derivative used the lines of the other family.
    pub transverse_tangents: usize,
}

/// Time-independent corrected operators `delta_xx`, `delta_yy`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialOperators {
    pub grid: Grid2D,
    pub sides: Vec<Side>,
    pub inv_alpha: Vec<f64>,
    pub x: AxisOperators,
    pub y: AxisOperators,
    pub diagnostics: AssemblyDiagnostics,
}

impl SpatialOperators {
    pub fn build(problem: &ProblemSpec, topology: &CrossingTopology) -> Result<Self> {
        problem.validate()?;
        let grid = problem.grid;
        let n = grid.n();
        let sides = classify_nodes(&grid, &problem.interface);
        for j in 0..n {
            for i in 0..n {
                if grid.is_boundary(i, j) && sides[grid.index(i, j)] != Side::Plus {
                    return Err(Error::InvalidInput(format!(
                        "boundary node ({i}, {j}) lies inside the interface; the outer boundary must be in the plus region"
                    )));
                }
            }
        }
        let inv_alpha = sides.iter().map(|&s| 1.0 / problem.alpha(s)).collect();
        let mut diagnostics = AssemblyDiagnostics::default();
        let x = build_axis(problem, topology, &sides, Axis::X, &mut diagnostics)?;
        let y = build_axis(problem, topology, &sides, Axis::Y, &mut diagnostics)?;
        Ok(Self {
            grid,
            sides,
            inv_alpha,
            x,
            y,
            diagnostics,
        })
    }

    pub fn axis(&self, axis: Axis) -> &AxisOperators {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }

    /// `(phi, flux)` for every cut of one axis.
    pub fn slot_values(&self, axis: Axis, jumps: &JumpData, u: &[f64], t: f64) -> Vec<[f64; 2]> {
        self.axis(axis).cuts.iter().map(|c| c.slot_values(jumps, u, t)).collect()
    }

    /// Corrected `delta` along `axis` applied to `u` at every interior node; boundary entries are zero.
    pub fn apply_delta(&self, axis: Axis, u: &[f64], slots: &[[f64; 2]], out: &mut [f64]) {
        let grid = &self.grid;
        let n = grid.n();
        let inv_h2 = 1.0 / (grid.h() * grid.h());
        let stride = match axis {
            Axis::X => 1,
            Axis::Y => n,
        };
        out.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            if j == 0 || j + 1 == n {
                row.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
            row[0] = 0.0;
            row[n - 1] = 0.0;
            let p = j * n + 1;
            let (lo, mid, hi) = (&u[p - stride..], &u[p..p + n - 2], &u[p + stride..]);
            row[1..n - 1]
                .iter_mut()
                .zip(mid.iter().zip(lo).zip(hi))
                .for_each(|(v, ((m, l), h))| *v = (l - 2.0 * m + h) * inv_h2);
        });
        let ax = self.axis(axis);
        for line in &ax.lines {
            for row in &line.rows {
                out[row.node] = row_value(grid, line, row, u, slots);
            }
        }
    }

    /// Sparse rows of `D` (implicit part) for one axis over all interior nodes,
    /// pushed as `(row, col, value)` triplets.
    pub fn implicit_entries(&self, axis: Axis) -> Vec<(usize, usize, f64)> {
        let grid = &self.grid;
        let n = grid.n();
        let inv_h2 = 1.0 / (grid.h() * grid.h());
        let ax = self.axis(axis);
        let mut irregular = vec![false; n * n];
        let mut out = Vec::with_capacity(3 * n * n);
        for line in &ax.lines {
            for row in &line.rows {
                irregular[row.node] = true;
                for &(q, c) in &row.coeffs {
                    out.push((row.node, grid.line_node(axis, line.line, q), c));
                }
            }
        }
        let stride = match axis {
            Axis::X => 1,
            Axis::Y => n,
        };
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let p = grid.index(i, j);
                if !irregular[p] {
                    out.push((p, p - stride, inv_h2));
                    out.push((p, p, -2.0 * inv_h2));
                    out.push((p, p + stride, inv_h2));
                }
            }
        }
        out
    }

    /// Sparse entries of `B` (dependence on the previous level through tangential derivatives).
    pub fn explicit_entries(&self, axis: Axis) -> Vec<(usize, usize, f64)> {
        let ax = self.axis(axis);
        let mut out = Vec::new();
        for row in ax.irregular_rows() {
            for s in row.slots.iter().filter(|s| s.kind == SlotKind::Flux) {
                let cut = &ax.cuts[s.cut];
                for &(p, w) in &cut.tangential.weights {
                    out.push((row.node, p, s.coef * cut.flux.u_tau * w));
                }
            }
        }
        out
    }

    /// Field-independent correction `Phi` for one axis at time `t`.
    pub fn nonhomogeneous(&self, axis: Axis, jumps: &JumpData, t: f64) -> Vec<(usize, f64)> {
        let ax = self.axis(axis);
        let values: Vec<[f64; 2]> = ax.cuts.iter().map(|c| c.slot_values_without_field(jumps, t)).collect();
        ax.irregular_rows()
            .map(|row| (row.node, slot_sum(&row.slots, &values)))
            .collect()
    }

    /// Assemble and factor `(1/alpha) I - dt delta` for every interior line of one axis.
    pub fn line_factors(&self, axis: Axis, dt: f64) -> Result<Vec<Option<PerturbedFactor>>> {
        let n = self.grid.n();
        let ax = self.axis(axis);
        ax.lines
            .par_iter()
            .map(|line| {
                if line.line == 0 || line.line + 1 == n {
                    return Ok(None);
                }
                let sys = self.line_system(line, dt)?;
                Ok(Some(sys.factor()?))
            })
            .collect()
    }

    /// The line matrix `(1/alpha) I - dt delta` with identity rows at the two boundary nodes.
    pub fn line_system(&self, line: &LineOperator, dt: f64) -> Result<PerturbedSystem> {
        let grid = &self.grid;
        let n = grid.n();
        let inv_h2 = 1.0 / (grid.h() * grid.h());
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut irregular: BTreeMap<usize, &IrregularRow> = BTreeMap::new();
        for r in &line.rows {
            irregular.insert(r.position, r);
        }
        for p in 0..n {
            if p == 0 || p + 1 == n {
                rows.push(vec![(p, 1.0)]);
                continue;
            }
            let node = grid.line_node(line.axis, line.line, p);
            let ia = self.inv_alpha[node];
            match irregular.get(&p) {
                Some(r) => {
                    let mut row: Vec<(usize, f64)> = r.coeffs.iter().map(|&(q, c)| (q, -dt * c)).collect();
                    row.push((p, ia));
                    rows.push(row);
                }
                None => rows.push(vec![
                    (p - 1, -dt * inv_h2),
                    (p, ia + 2.0 * dt * inv_h2),
                    (p + 1, -dt * inv_h2),
                ]),
            }
        }
        PerturbedSystem::from_rows(&rows, line.blocks.clone())
    }
}

fn slot_sum(slots: &[SlotRef], values: &[[f64; 2]]) -> f64 {
    slots
        .iter()
        .map(|s| {
            let v = values[s.cut];
            s.coef
                * match s.kind {
                    SlotKind::Phi => v[0],
                    SlotKind::Flux => v[1],
                }
        })
        .sum()
}

/// Slot contribution of an irregular row.
pub fn row_slot_term(row: &IrregularRow, slots: &[[f64; 2]]) -> f64 {
    slot_sum(&row.slots, slots)
}

fn row_value(grid: &Grid2D, line: &LineOperator, row: &IrregularRow, u: &[f64], slots: &[[f64; 2]]) -> f64 {
    row.coeffs
        .iter()
        .map(|&(q, c)| c * u[grid.line_node(line.axis, line.line, q)])
        .sum::<f64>()
        + slot_sum(&row.slots, slots)
}

fn build_axis(
    problem: &ProblemSpec,
    topology: &CrossingTopology,
    sides: &[Side],
    axis: Axis,
    diagnostics: &mut AssemblyDiagnostics,
) -> Result<AxisOperators> {
    let grid = &problem.grid;
    let n = grid.n();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let mut cuts = Vec::new();
    let mut lines = Vec::with_capacity(n);

    for line_cuts in topology.lines(axis) {
        let line = line_cuts.line_index;
        let mut op = LineOperator {
            axis,
            line,
            rows: Vec::new(),
            blocks: Vec::new(),
        };
        if line == 0 || line + 1 == n || line_cuts.is_empty() {
            lines.push(op);
            continue;
        }
        let line_sides: Vec<Side> = (0..n).map(|k| sides[grid.line_node(axis, line, k)]).collect();

        // Fictitious stencils keyed by (node, side), with slots mapped to global cut ids.
        let mut fictitious: BTreeMap<(usize, bool), (FictitiousStencil, Vec<usize>)> = BTreeMap::new();
        for group in &line_cuts.groups {
            let (members, stencils, block) = match *group {
                CrossingGroup::Regular(a) => {
                    let c = &line_cuts.crossings[a];
                    diagnostics.regular_cuts += 1;
                    (
                        vec![a],
                        solve_regular_fictitious(grid, &line_sides, c, problem.alpha_minus, problem.alpha_plus)?,
                        PatternBlock::Regular { row: c.left_node },
                    )
                }
                CrossingGroup::Corner(a, b) => {
                    let (c1, c2) = (&line_cuts.crossings[a], &line_cuts.crossings[b]);
                    diagnostics.corner_pairs += 1;
                    (
                        vec![a, b],
                        solve_corner_fictitious(grid, &line_sides, c1, c2, problem.alpha_minus, problem.alpha_plus)?,
                        PatternBlock::Corner { row: c1.left_node },
                    )
                }
            };
            let mut ids = Vec::with_capacity(members.len());
            for &m in &members {
                let crossing = line_cuts.crossings[m];
                ids.push(cuts.len());
                let record = cut_record(problem, crossing, diagnostics)?;
                cuts.push(record);
            }
            for st in stencils {
                fictitious.insert((st.node, st.side == Side::Plus), (st, ids.clone()));
            }
            op.blocks.push(block);
        }

        for p in 1..n - 1 {
            let s = line_sides[p];
            if line_sides[p - 1] == s && line_sides[p + 1] == s {
                continue;
            }
            let mut coeffs: BTreeMap<usize, f64> = BTreeMap::new();
            let mut slots: Vec<SlotRef> = Vec::new();
            *coeffs.entry(p).or_insert(0.0) -= 2.0 * inv_h2;
            for q in [p - 1, p + 1] {
                if line_sides[q] == s {
                    *coeffs.entry(q).or_insert(0.0) += inv_h2;
                    continue;
                }
                let (st, ids) = fictitious.get(&(q, s == Side::Plus)).ok_or_else(|| {
                    let (x, y) = grid.line_point(axis, line, grid.coord(q));
                    Error::StencilUnavailable {
                        x,
                        y,
                        reason: format!("no fictitious value for node {q} on {axis} line {line}"),
                    }
                })?;
                for &(r, w) in &st.implicit {
                    *coeffs.entry(r).or_insert(0.0) += w * inv_h2;
                }
                for (e, &w) in st.slots.iter().enumerate() {
                    slots.push(SlotRef {
                        cut: ids[e / 2],
                        kind: if e % 2 == 0 { SlotKind::Phi } else { SlotKind::Flux },
                        coef: w * inv_h2,
                    });
                }
            }
            op.rows.push(IrregularRow {
                position: p,
                node: grid.line_node(axis, line, p),
                coeffs: coeffs.into_iter().filter(|&(_, c)| c != 0.0).collect(),
                slots,
            });
        }
        lines.push(op);
    }
    Ok(AxisOperators { axis, lines, cuts })
}

fn cut_record(problem: &ProblemSpec, crossing: LineCrossing, diagnostics: &mut AssemblyDiagnostics) -> Result<CutRecord> {
    let grid = &problem.grid;
    let (tangential, route) = tangential_stencil_with_fallback(grid, &problem.interface, &crossing)?;
    if tangential.side == Side::Minus {
        diagnostics.minus_side_tangents += 1;
    }
    if route == TangentialRoute::Transverse {
        diagnostics.transverse_tangents += 1;
        log::debug!(
            "tangential derivative at ({:.6}, {:.6}) taken across the {} lines",
            tangential.point.0,
            tangential.point.1,
            crossing.axis.other()
        );
    }
    let flux = FluxJumpCoefficients::new(
        crossing.axis,
        crossing.theta,
        tangential.side,
        problem.alpha_minus,
        problem.alpha_plus,
    );
    Ok(CutRecord {
        crossing,
        point: crossing.point(grid),
        tangential,
        flux,
    })
}

/// Corrected operators plus the factored line systems for one time step size.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub spatial: SpatialOperators,
    pub dt: f64,
    pub x_factors: Vec<Option<PerturbedFactor>>,
    pub y_factors: Vec<Option<PerturbedFactor>>,
}

impl OperatorSet {
    pub fn new(spatial: SpatialOperators, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        let x_factors = spatial.line_factors(Axis::X, dt)?;
        let y_factors = spatial.line_factors(Axis::Y, dt)?;
        Ok(Self {
            spatial,
            dt,
            x_factors,
            y_factors,
        })
    }
}

pub fn assemble_operators(problem: &ProblemSpec, topology: &CrossingTopology, dt: f64) -> Result<OperatorSet> {
    OperatorSet::new(SpatialOperators::build(problem, topology)?, dt)
}
