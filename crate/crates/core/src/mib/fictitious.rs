//! Fictitious values from one-dimensional jump conditions along a grid line.
//!
//! At each cut the jump conditions `u+ - u- = phi` and
//! `alpha+ u+' - alpha- u-' = psi` are discretized with one-sided polynomials, one
//! per side. A polynomial node on its own side contributes a real grid value;
//! a node across the interface contributes a fictitious unknown. Solving the
//! small system expresses every fictitious value through real values on the
//! line and the jump data of the cuts involved.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fd::fd_weights;
use crate::geometry::{Axis, Grid2D, LineCrossing, Side};
use crate::linalg::dense::DenseLu;

/// Determinants below this magnitude mark a singular jump system.
pub const SINGULAR_DET: f64 = 1e-14;

/// A fictitious value expressed as a linear combination of real line values and jump slots.
#[derive(Debug, Clone, PartialEq)]
pub struct FictitiousStencil {
    /// Node position along the line.
    pub node: usize,
    /// Branch extended to the node.
    pub side: Side,
    /// `(line position, weight)` on real values of the unknown at the new time level.
    pub implicit: Vec<(usize, f64)>,
    /// Coefficients on `[phi_1, psi_1, phi_2, psi_2, ...]`, one pair per cut of the group.
    pub slots: Vec<f64>,
}

impl FictitiousStencil {
    pub fn eval(&self, line_value: impl Fn(usize) -> f64, slot_values: &[f64]) -> f64 {
        self.implicit.iter().map(|&(p, w)| w * line_value(p)).sum::<f64>()
            + self.slots.iter().zip(slot_values).map(|(c, v)| c * v).sum::<f64>()
    }
}

/// One-sided polynomial support: side and node positions along the line.
#[derive(Debug, Clone, PartialEq)]
struct Support {
    side: Side,
    nodes: Vec<isize>,
}

/// Cut with its plus- and minus-side supports.
#[derive(Debug, Clone)]
struct CutSupports<'a> {
    crossing: &'a LineCrossing,
    plus: Support,
    minus: Support,
}

/// Side of each node along one grid line.
pub fn line_sides(grid: &Grid2D, iface: &crate::geometry::InterfaceModel, axis: Axis, line: usize) -> Vec<Side> {
    (0..grid.n())
        .map(|k| {
            let (x, y) = grid.line_point(axis, line, grid.coord(k));
            iface.side_at(x, y)
        })
        .collect()
}

fn solve_group(
    grid: &Grid2D,
    sides: &[Side],
    cuts: &[CutSupports<'_>],
    alpha_minus: f64,
    alpha_plus: f64,
) -> Result<Vec<FictitiousStencil>> {
    let n = grid.n() as isize;
    let first = cuts[0].crossing;
    let unavailable = |reason: String| {
        let (x, y) = first.point(grid);
        Error::StencilUnavailable { x, y, reason }
    };

    // Collect fictitious unknowns (node, side) in a fixed order.
    let mut unknowns: Vec<(usize, Side)> = Vec::new();
    for cut in cuts {
        for sup in [&cut.plus, &cut.minus] {
            for &p in &sup.nodes {
                if p < 0 || p >= n {
                    return Err(unavailable(format!("support node {p} lies outside the grid line")));
                }
                let p = p as usize;
                if sides[p] != sup.side && !unknowns.contains(&(p, sup.side)) {
                    unknowns.push((p, sup.side));
                }
            }
        }
    }
    unknowns.sort_by_key(|&(p, s)| (p, s == Side::Plus));
    let m = 2 * cuts.len();
    if unknowns.len() != m {
        return Err(unavailable(format!(
            "{} fictitious values for {m} jump conditions",
            unknowns.len()
        )));
    }

    let mut a = vec![vec![0.0; m]; m];
    let mut real: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); m];
    for (c, cut) in cuts.iter().enumerate() {
        for (sup, sign) in [(&cut.plus, 1.0), (&cut.minus, -1.0)] {
            let coords: Vec<f64> = sup.nodes.iter().map(|&p| grid.coord(p as usize)).collect();
            let alpha = if sup.side == Side::Plus { alpha_plus } else { alpha_minus };
            let w0 = fd_weights(&coords, cut.crossing.cut, 0)?;
            let w1 = fd_weights(&coords, cut.crossing.cut, 1)?;
            for (q, &p) in sup.nodes.iter().enumerate() {
                let p = p as usize;
                let entries = [(2 * c, sign * w0.weights[q]), (2 * c + 1, sign * alpha * w1.weights[q])];
                if sides[p] == sup.side {
                    for (row, v) in entries {
                        *real[row].entry(p).or_insert(0.0) += v;
                    }
                } else {
                    let col = unknowns.iter().position(|&u| u == (p, sup.side)).unwrap();
                    for (row, v) in entries {
                        a[row][col] += v;
                    }
                }
            }
        }
    }

    let lu = DenseLu::new(&a);
    if !(lu.det().abs() >= SINGULAR_DET) {
        return Err(Error::SingularMibSystem {
            axis: first.axis,
            line: first.line_index,
            node: unknowns[0].0,
            det: lu.det(),
        });
    }

    // A z = slots - R u_real
    let real_nodes: Vec<usize> = {
        let mut v: Vec<usize> = real.iter().flat_map(|r| r.keys().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut implicit_cols = Vec::with_capacity(real_nodes.len());
    for &p in &real_nodes {
        let rhs: Vec<f64> = real.iter().map(|r| -r.get(&p).copied().unwrap_or(0.0)).collect();
        implicit_cols.push(lu.solve(&rhs)?);
    }
    let mut slot_cols = Vec::with_capacity(m);
    for e in 0..m {
        let mut rhs = vec![0.0; m];
        rhs[e] = 1.0;
        slot_cols.push(lu.solve(&rhs)?);
    }

    Ok(unknowns
        .iter()
        .enumerate()
        .map(|(row, &(node, side))| FictitiousStencil {
            node,
            side,
            implicit: real_nodes
                .iter()
                .zip(&implicit_cols)
                .map(|(&p, col)| (p, col[row]))
                .collect(),
            slots: slot_cols.iter().map(|col| col[row]).collect(),
        })
        .collect())
}

/// Supports `(plus, minus)` for a cut whose left node has side `left`.
fn oriented(crossing: &LineCrossing, left_nodes: Vec<isize>, right_nodes: Vec<isize>) -> (Support, Support) {
    let left = Support {
        side: crossing.side_of_left,
        nodes: left_nodes,
    };
    let right = Support {
        side: crossing.side_of_right(),
        nodes: right_nodes,
    };
    if crossing.side_of_left == Side::Plus {
        (left, right)
    } else {
        (right, left)
    }
}

/// Two fictitious values for an isolated cut between nodes `j` and `j + 1`, using
/// three-point supports `(j-1, j, j+1)` and `(j, j+1, j+2)`.
pub fn solve_regular_fictitious(
    grid: &Grid2D,
    sides: &[Side],
    crossing: &LineCrossing,
    alpha_minus: f64,
    alpha_plus: f64,
) -> Result<Vec<FictitiousStencil>> {
    let j = crossing.left_node as isize;
    let (plus, minus) = oriented(crossing, vec![j - 1, j, j + 1], vec![j, j + 1, j + 2]);
    solve_group(
        grid,
        sides,
        &[CutSupports { crossing, plus, minus }],
        alpha_minus,
        alpha_plus,
    )
}

/// Which end the fourth corner unknown sits at: `j - 2` when `d1 < d2`, else `j + 2`.
pub fn corner_fourth_node(j: usize, d1: f64, d2: f64) -> isize {
    if d1 < d2 {
        j as isize - 2
    } else {
        j as isize + 2
    }
}

/// Four fictitious values for two cuts enclosing the single node `j`.
pub fn solve_corner_fictitious(
    grid: &Grid2D,
    sides: &[Side],
    first: &LineCrossing,
    second: &LineCrossing,
    alpha_minus: f64,
    alpha_plus: f64,
) -> Result<Vec<FictitiousStencil>> {
    let j = first.right_node;
    if second.left_node != j {
        return Err(Error::InvalidInput(format!(
            "cuts at {} and {} do not enclose exactly one node",
            first.cut, second.cut
        )));
    }
    let ji = j as isize;
    let d1 = (first.cut - grid.coord(j - 1)).abs();
    let d2 = (grid.coord(j + 1) - second.cut).abs();
    let middle = if corner_fourth_node(j, d1, d2) < ji {
        vec![ji - 2, ji - 1, ji, ji + 1]
    } else {
        vec![ji - 1, ji, ji + 1, ji + 2]
    };
    let (p1, m1) = oriented(first, vec![ji - 2, ji - 1, ji, ji + 1], middle.clone());
    let (p2, m2) = oriented(second, middle, vec![ji - 1, ji, ji + 1, ji + 2]);
    solve_group(
        grid,
        sides,
        &[
            CutSupports {
                crossing: first,
                plus: p1,
                minus: m1,
            },
            CutSupports {
                crossing: second,
                plus: p2,
                minus: m2,
            },
        ],
        alpha_minus,
        alpha_plus,
    )
}
