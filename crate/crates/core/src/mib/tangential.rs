//! Tangential derivative at an interface point from six same-side grid values.
//!
//! The tangent line through the cut meets the two neighbouring parallel grid
//! lines at auxiliary points. Each auxiliary value is interpolated from three
//! consecutive nodes of one subdomain on that line, and the derivative is the
//! central difference of the two auxiliary values along the tangent. Where
//! that construction is unavailable, the tangent is intersected with the three
//! nearest lines of the other family instead.

use crate::error::{Error, Result};
use crate::fd::fd_weights;
use crate::geometry::{Axis, Grid2D, InterfaceModel, LineCrossing, Side};

/// Tangent components below this make the auxiliary points run off to infinity.
pub const TANGENT_DEGENERACY: f64 = 1e-10;
/// Interpolation windows must be centred within this many spacings of the auxiliary point.
pub const MAX_WINDOW_OFFSET: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TangentialStencil {
    pub point: (f64, f64),
    pub theta: f64,
    pub side: Side,
    /// Auxiliary points on the grid lines met by the tangent, in order along it.
    pub aux: Vec<(f64, f64)>,
    /// `(flat node index, weight)`, three entries per auxiliary point.
    pub weights: Vec<(usize, f64)>,
}

impl TangentialStencil {
    pub fn apply(&self, u: &[f64]) -> f64 {
        self.weights.iter().map(|&(p, w)| w * u[p]).sum()
    }
}

/// Unit tangent `(-sin theta, cos theta)`.
pub fn tangent(theta: f64) -> (f64, f64) {
    (-theta.sin(), theta.cos())
}

/// Tangent line through `point` intersected with the given grid lines of one family.
fn stencil_on_lines(
    grid: &Grid2D,
    iface: &InterfaceModel,
    point: (f64, f64),
    theta: f64,
    side: Side,
    family: Axis,
    lines: &[usize],
) -> Result<TangentialStencil> {
    let n = grid.n();
    let h = grid.h();
    let (px, py) = point;
    let (tx, ty) = tangent(theta);
    // Components across the family's lines and along them.
    let (pf, pr, tf, tr) = match family {
        Axis::Y => (px, py, tx, ty),
        Axis::X => (py, px, ty, tx),
    };
    if tf.abs() < TANGENT_DEGENERACY {
        return Err(Error::TangentDegenerate { x: px, y: py, theta });
    }
    let unavailable = |reason: String| Error::StencilUnavailable { x: px, y: py, reason };

    let mut aux = Vec::with_capacity(lines.len());
    let mut params = Vec::with_capacity(lines.len());
    let mut windows = Vec::with_capacity(lines.len());
    for &line in lines {
        let s = (grid.coord(line) - pf) / tf;
        let r = pr + s * tr;
        if r.abs() > grid.half_width() {
            return Err(unavailable(format!("auxiliary point at {r:.6} lies outside the domain")));
        }
        let mut best: Option<(f64, usize)> = None;
        for k0 in 0..n - 2 {
            let same = (k0..k0 + 3).all(|k| {
                let (x, y) = grid.line_point(family, line, grid.coord(k));
                iface.side_at(x, y) == side
            });
            if !same {
                continue;
            }
            let dist = (grid.coord(k0 + 1) - r).abs();
            if dist <= MAX_WINDOW_OFFSET * h && best.is_none_or(|(d, _)| dist < d) {
                best = Some((dist, k0));
            }
        }
        let Some((_, k0)) = best else {
            return Err(unavailable(format!(
                "fewer than three {side} nodes near the auxiliary point on {family} line {line}"
            )));
        };
        aux.push(grid.line_point(family, line, r));
        params.push(s);
        windows.push((line, k0, r));
    }

    let ds = fd_weights(&params, 0.0, 1)?;
    let mut weights = Vec::with_capacity(3 * lines.len());
    for (&(line, k0, r), &d) in windows.iter().zip(&ds.weights) {
        let coords = [grid.coord(k0), grid.coord(k0 + 1), grid.coord(k0 + 2)];
        let interp = fd_weights(&coords, r, 0)?;
        for (m, w) in interp.weights.iter().enumerate() {
            weights.push((grid.line_node(family, line, k0 + m), d * w));
        }
    }
    Ok(TangentialStencil {
        point,
        theta,
        side,
        aux,
        weights,
    })
}

/// Central difference along the tangent between the two neighbouring parallel lines.
pub fn build_tangential_stencil(
    grid: &Grid2D,
    iface: &InterfaceModel,
    crossing: &LineCrossing,
    side: Side,
) -> Result<TangentialStencil> {
    let point = crossing.point(grid);
    let line = crossing.line_index;
    if line == 0 || line + 1 >= grid.n() {
        return Err(Error::StencilUnavailable {
            x: point.0,
            y: point.1,
            reason: "tangent line leaves the grid".into(),
        });
    }
    stencil_on_lines(grid, iface, point, crossing.theta, side, crossing.axis, &[line - 1, line + 1])
}

/// Tangential derivative from the three lines of the other family nearest the cut.
///
/// Used when the tangent is nearly parallel to the crossing's own grid lines and
/// the neighbouring-line construction reaches too far.
pub fn build_transverse_tangential_stencil(
    grid: &Grid2D,
    iface: &InterfaceModel,
    crossing: &LineCrossing,
    side: Side,
) -> Result<TangentialStencil> {
    let n = grid.n();
    let point = crossing.point(grid);
    let nearest = ((crossing.cut + grid.half_width()) / grid.h()).round() as usize;
    let mid = nearest.clamp(1, n - 2);
    stencil_on_lines(
        grid,
        iface,
        point,
        crossing.theta,
        side,
        crossing.axis.other(),
        &[mid - 1, mid, mid + 1],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TangentialRoute {
    Neighbouring,
    Transverse,
}

/// First available stencil, preferring the plus side and the neighbouring-line form.
pub fn tangential_stencil_with_fallback(
    grid: &Grid2D,
    iface: &InterfaceModel,
    crossing: &LineCrossing,
) -> Result<(TangentialStencil, TangentialRoute)> {
    let mut last = None;
    for side in [Side::Plus, Side::Minus] {
        for route in [TangentialRoute::Neighbouring, TangentialRoute::Transverse] {
            let built = match route {
                TangentialRoute::Neighbouring => build_tangential_stencil(grid, iface, crossing, side),
                TangentialRoute::Transverse => build_transverse_tangential_stencil(grid, iface, crossing, side),
            };
            match built {
                Ok(st) => return Ok((st, route)),
                Err(e @ (Error::StencilUnavailable { .. } | Error::TangentDegenerate { .. })) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
    }
    Err(last.expect("at least one construction attempted"))
}
