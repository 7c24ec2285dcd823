//! Computational grid, interface shapes and grid-line/interface intersections.
//!
//! A grid line is identified by the axis it runs along and the index of its
//! fixed coordinate: the [`Axis::X`] line with index `j` is `y = y_j`, the
//! [`Axis::Y`] line with index `i` is `x = x_i`. Nodes along a line are
//! numbered by the running coordinate.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Bisection stops once the bracket is narrower than this multiple of `h`.
pub const ROOT_TOLERANCE: f64 = 1e-13;
pub const ROOT_MAX_ITERATIONS: usize = 200;
/// Level-set values smaller than this are treated as `+NUDGE` (node goes to the plus side).
pub const NUDGE: f64 = 1e-12;
/// Extra samples per grid interval used to detect two cuts hiding between adjacent nodes.
const HIDDEN_CUT_SAMPLES: usize = 7;

/// Direction a grid line runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
        }
    }
}

/// Subdomain label: `Minus` is the interior region, `Plus` the exterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    fn from_level(level: f64) -> Side {
        if level <= -NUDGE {
            Side::Minus
        } else {
            Side::Plus
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Minus => write!(f, "minus"),
            Side::Plus => write!(f, "plus"),
        }
    }
}

/// Uniform tensor grid on `[-half_width, half_width]^2` with `n` nodes per direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    half_width: f64,
    n: usize,
    h: f64,
}

impl Grid2D {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "domain half width must be positive, got {half_width}"
            )));
        }
        if n < 5 {
            return Err(Error::InvalidInput(format!(
                "need at least 5 nodes per direction, got {n}"
            )));
        }
        Ok(Self {
            half_width,
            n,
            h: 2.0 * half_width / (n - 1) as f64,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Coordinate of node `k` along either direction.
    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        let m = (self.n - 1) as f64;
        self.half_width * ((2.0 * k as f64 - m) / m)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.coord(i)
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.coord(j)
    }

    /// Flat index of node `(i, j)`; `x` varies fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n * self.n
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n || j + 1 == self.n
    }

    /// Flat index of node `k` on the given grid line.
    #[inline]
    pub fn line_node(&self, axis: Axis, line: usize, k: usize) -> usize {
        match axis {
            Axis::X => self.index(k, line),
            Axis::Y => self.index(line, k),
        }
    }

    /// Physical point at running coordinate `s` on a grid line.
    #[inline]
    pub fn line_point(&self, axis: Axis, line: usize, s: f64) -> (f64, f64) {
        match axis {
            Axis::X => (s, self.coord(line)),
            Axis::Y => (self.coord(line), s),
        }
    }
}

/// Closed interface curves supported by the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Circle { radius: f64 },
    /// `r = 1/2 + amplitude * sin(leaves * s)` in polar coordinates.
    PolarLeaf { leaves: u32, amplitude: f64 },
    /// No interface: the whole domain is the plus region.
    Empty,
}

/// Analytic interface with level function `sigma < 0` inside (minus side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceModel {
    shape: Shape,
}

impl InterfaceModel {
    pub fn new(shape: Shape) -> Result<Self> {
        match shape {
            Shape::Circle { radius } if !(radius > 0.0) => {
                return Err(Error::InvalidInput(format!("circle radius {radius} must be positive")))
            }
            Shape::PolarLeaf { leaves, amplitude } if leaves == 0 || !(amplitude.abs() < 0.5) => {
                return Err(Error::InvalidInput(format!(
                    "polar leaf needs leaves >= 1 and |amplitude| < 1/2, got ({leaves}, {amplitude})"
                )))
            }
            _ => {}
        }
        Ok(Self { shape })
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(Shape::Circle { radius })
    }

    pub fn polar_leaf(leaves: u32, amplitude: f64) -> Result<Self> {
        Self::new(Shape::PolarLeaf { leaves, amplitude })
    }

    pub fn empty() -> Self {
        Self { shape: Shape::Empty }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Signed level function.
    #[inline]
    pub fn level(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        match self.shape {
            Shape::Circle { radius } => r - radius,
            Shape::PolarLeaf { leaves, amplitude } => {
                let s = y.atan2(x);
                r - (0.5 + amplitude * (leaves as f64 * s).sin())
            }
            Shape::Empty => 1.0,
        }
    }

    /// Analytic gradient of the level function.
    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let r = x.hypot(y);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        match self.shape {
            Shape::Circle { .. } => (x / r, y / r),
            Shape::PolarLeaf { leaves, amplitude } => {
                let m = leaves as f64;
                let s = y.atan2(x);
                let dr_ds = amplitude * m * (m * s).cos();
                let r2 = r * r;
                // ds/dx = -y/r^2, ds/dy = x/r^2
                (x / r + dr_ds * y / r2, y / r - dr_ds * x / r2)
            }
            Shape::Empty => (0.0, 0.0),
        }
    }

    #[inline]
    pub fn side_at(&self, x: f64, y: f64) -> Side {
        Side::from_level(self.level(x, y))
    }

    /// Angle of the outward unit normal (pointing into the plus side) at `(x, y)`.
    pub fn normal_angle_at(&self, x: f64, y: f64) -> Result<f64> {
        let (gx, gy) = self.gradient(x, y);
        let magnitude = gx.hypot(gy);
        if magnitude < 1e-12 {
            return Err(Error::DegenerateNormal { x, y, magnitude });
        }
        Ok(gy.atan2(gx))
    }

    /// Point on the interface at polar angle `s`.
    pub fn point_at_polar_angle(&self, s: f64) -> (f64, f64) {
        let r = match self.shape {
            Shape::Circle { radius } => radius,
            Shape::PolarLeaf { leaves, amplitude } => 0.5 + amplitude * (leaves as f64 * s).sin(),
            Shape::Empty => f64::NAN,
        };
        (r * s.cos(), r * s.sin())
    }
}

/// Side of grid node `(i, j)`.
pub fn classify_node(grid: &Grid2D, iface: &InterfaceModel, i: usize, j: usize) -> Side {
    iface.side_at(grid.x(i), grid.y(j))
}

/// Side of every node, flat-indexed.
pub fn classify_nodes(grid: &Grid2D, iface: &InterfaceModel) -> Vec<Side> {
    let n = grid.n();
    let mut sides = Vec::with_capacity(grid.node_count());
    for j in 0..n {
        for i in 0..n {
            sides.push(classify_node(grid, iface, i, j));
        }
    }
    sides
}

/// One intersection of the interface with a grid line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCrossing {
    pub axis: Axis,
    pub line_index: usize,
    /// Running coordinate of the cut along the line.
    pub cut: f64,
    pub left_node: usize,
    pub right_node: usize,
    pub theta: f64,
    pub side_of_left: Side,
}

impl LineCrossing {
    pub fn point(&self, grid: &Grid2D) -> (f64, f64) {
        grid.line_point(self.axis, self.line_index, self.cut)
    }

    pub fn side_of_right(&self) -> Side {
        self.side_of_left.opposite()
    }
}

/// Classification of two consecutive cuts on one line by the nodes between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Two or more nodes between the cuts.
    Regular,
    /// Exactly one node between the cuts.
    Corner,
    /// No node between the cuts.
    RefineNeeded,
}

/// Crossings that are discretized together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingGroup {
    Regular(usize),
    Corner(usize, usize),
}

/// Cuts of one grid line, ordered by coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LineCuts {
    pub axis: Axis,
    pub line_index: usize,
    pub crossings: Vec<LineCrossing>,
    /// Classification of each consecutive pair `(k, k+1)`.
    pub pairings: Vec<Pairing>,
    pub groups: Vec<CrossingGroup>,
}

impl LineCuts {
    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }
}

/// All interface cuts of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingTopology {
    pub x_lines: Vec<LineCuts>,
    pub y_lines: Vec<LineCuts>,
}

impl CrossingTopology {
    pub fn lines(&self, axis: Axis) -> &[LineCuts] {
        match axis {
            Axis::X => &self.x_lines,
            Axis::Y => &self.y_lines,
        }
    }

    pub fn crossing_count(&self) -> usize {
        self.x_lines
            .iter()
            .chain(&self.y_lines)
            .map(|l| l.crossings.len())
            .sum()
    }

    pub fn corner_count(&self) -> usize {
        self.x_lines
            .iter()
            .chain(&self.y_lines)
            .flat_map(|l| &l.groups)
            .filter(|g| matches!(g, CrossingGroup::Corner(..)))
            .count()
    }
}

/// Normal angle at a crossing.
pub fn normal_angle(grid: &Grid2D, iface: &InterfaceModel, crossing: &LineCrossing) -> Result<f64> {
    let (x, y) = crossing.point(grid);
    iface.normal_angle_at(x, y)
}

/// Locate and classify every intersection of the interface with the grid lines.
pub fn find_crossings(grid: &Grid2D, iface: &InterfaceModel) -> Result<CrossingTopology> {
    let n = grid.n();
    let mut x_lines = Vec::with_capacity(n);
    let mut y_lines = Vec::with_capacity(n);
    for line in 0..n {
        x_lines.push(line_cuts(grid, iface, Axis::X, line)?);
        y_lines.push(line_cuts(grid, iface, Axis::Y, line)?);
    }
    Ok(CrossingTopology { x_lines, y_lines })
}

fn line_cuts(grid: &Grid2D, iface: &InterfaceModel, axis: Axis, line: usize) -> Result<LineCuts> {
    let n = grid.n();
    let h = grid.h();
    let level = |s: f64| {
        let (x, y) = grid.line_point(axis, line, s);
        iface.level(x, y)
    };
    let side = |s: f64| Side::from_level(level(s));

    let mut crossings = Vec::new();
    for k in 0..n - 1 {
        let (a, b) = (grid.coord(k), grid.coord(k + 1));
        let (side_a, side_b) = (side(a), side(b));

        let mut changes = 0;
        let mut prev = side_a;
        for q in 1..=HIDDEN_CUT_SAMPLES + 1 {
            let s = if q == HIDDEN_CUT_SAMPLES + 1 {
                b
            } else {
                a + (b - a) * q as f64 / (HIDDEN_CUT_SAMPLES + 1) as f64
            };
            let cur = side(s);
            if cur != prev {
                changes += 1;
            }
            prev = cur;
        }
        if changes >= 2 {
            return Err(Error::RefinementRequired {
                axis,
                line,
                first: a,
                second: b,
            });
        }
        if side_a == side_b {
            continue;
        }

        // Bisect on the raw sign of the level function; the nudged sign is only
        // needed when a node sits within the nudge band of the curve.
        let raw_split = (level(a) < 0.0) != (level(b) < 0.0);
        let below = |s: f64| {
            if raw_split {
                level(s) < 0.0
            } else {
                side(s) == Side::Minus
            }
        };
        let lo_below = below(a);
        let (mut lo, mut hi) = (a, b);
        for _ in 0..ROOT_MAX_ITERATIONS {
            if hi - lo <= ROOT_TOLERANCE * h {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if below(mid) == lo_below {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cut = 0.5 * (lo + hi);
        let (x, y) = grid.line_point(axis, line, cut);
        crossings.push(LineCrossing {
            axis,
            line_index: line,
            cut,
            left_node: k,
            right_node: k + 1,
            theta: iface.normal_angle_at(x, y)?,
            side_of_left: side_a,
        });
    }

    if crossings.len() > 2 {
        return Err(Error::TooManyCrossings {
            axis,
            line,
            count: crossings.len(),
        });
    }

    let mut pairings = Vec::new();
    for w in crossings.windows(2) {
        let between = w[1].left_node + 1 - w[0].right_node;
        let pairing = match between {
            0 => Pairing::RefineNeeded,
            1 => Pairing::Corner,
            _ => Pairing::Regular,
        };
        if pairing == Pairing::RefineNeeded {
            return Err(Error::RefinementRequired {
                axis,
                line,
                first: w[0].cut,
                second: w[1].cut,
            });
        }
        pairings.push(pairing);
    }

    let mut groups = Vec::new();
    let mut k = 0;
    while k < crossings.len() {
        if k < pairings.len() && pairings[k] == Pairing::Corner {
            groups.push(CrossingGroup::Corner(k, k + 1));
            k += 2;
        } else {
            groups.push(CrossingGroup::Regular(k));
            k += 1;
        }
    }

    Ok(LineCuts {
        axis,
        line_index: line,
        crossings,
        pairings,
        groups,
    })
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(d: f64, n: usize) -> Grid2D {
        Grid2D::new(d, n).unwrap()
    }

    #[test]
    fn grid_spacing_and_endpoints() {
        let g = grid(1.99, 21);
        assert!((g.h() - 0.199).abs() < 1e-15);
        assert_eq!(g.x(0), -1.99);
        assert_eq!(g.x(20), 1.99);
        assert_eq!(g.y(20), 1.99);
    }

    #[test]
    fn classify_examples() {
        let c = InterfaceModel::circle(1.0).unwrap();
        assert_eq!(c.side_at(0.0, 0.0), Side::Minus);
        assert_eq!(c.side_at(1.99, 0.0), Side::Plus);
        let leaf = InterfaceModel::polar_leaf(4, 0.1).unwrap();
        // r - (1/2 + b sin 0) = 0.55 - 0.5 > 0
        assert_eq!(leaf.side_at(0.55, 0.0), Side::Plus);
        assert_eq!(leaf.side_at(0.45, 0.0), Side::Minus);
    }

    #[test]
    fn on_curve_node_goes_plus() {
        let c = InterfaceModel::circle(1.0).unwrap();
        assert_eq!(c.side_at(1.0, 0.0), Side::Plus);
        assert_eq!(c.side_at(1.0 - 1e-13, 0.0), Side::Plus);
        assert_eq!(c.side_at(1.0 - 1e-11, 0.0), Side::Minus);
    }

    #[test]
    fn circle_line_through_center() {
        let g = grid(1.99, 21);
        let c = InterfaceModel::circle(1.0).unwrap();
        let topo = find_crossings(&g, &c).unwrap();
        let line = &topo.x_lines[10];
        assert_eq!(g.y(10), 0.0);
        assert_eq!(line.crossings.len(), 2);
        assert!((line.crossings[0].cut + 1.0).abs() < 1e-12);
        assert!((line.crossings[1].cut - 1.0).abs() < 1e-12);
        assert!((line.crossings[0].theta.abs() - PI).abs() < 1e-12);
        assert!(line.crossings[1].theta.abs() < 1e-12);
        assert_eq!(line.crossings[0].side_of_left, Side::Plus);
        assert_eq!(line.crossings[1].side_of_left, Side::Minus);
    }

    #[test]
    fn line_missing_circle_has_no_cuts() {
        let g = grid(1.99, 41);
        let c = InterfaceModel::circle(1.0).unwrap();
        let topo = find_crossings(&g, &c).unwrap();
        // y_j = 1.5 is not a grid value here; take the nearest line above 1.
        for line in topo.x_lines.iter().filter(|l| g.y(l.line_index).abs() > 1.0) {
            assert!(line.is_empty());
        }
    }

    #[test]
    fn circle_normals_are_radial() {
        let c = InterfaceModel::circle(1.0).unwrap();
        assert!(c.normal_angle_at(1.0, 0.0).unwrap().abs() < 1e-15);
        assert!((c.normal_angle_at(0.0, 1.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(matches!(
            c.normal_angle_at(0.0, 0.0),
            Err(Error::DegenerateNormal { .. })
        ));
    }

    #[test]
    fn polar_leaf_normal_matches_finite_differences() {
        let leaf = InterfaceModel::polar_leaf(2, 0.25).unwrap();
        let (x, y) = leaf.point_at_polar_angle(PI / 4.0);
        assert!(leaf.level(x, y).abs() < 1e-14);
        let eps = 1e-6;
        let gx = (leaf.level(x + eps, y) - leaf.level(x - eps, y)) / (2.0 * eps);
        let gy = (leaf.level(x, y + eps) - leaf.level(x, y - eps)) / (2.0 * eps);
        let theta = leaf.normal_angle_at(x, y).unwrap();
        assert!((wrap_angle(theta - gy.atan2(gx))).abs() < 1e-6);
    }

    #[test]
    fn circle_cuts_match_analytic_values() {
        let g = grid(0.99, 81);
        let c = InterfaceModel::circle(0.5).unwrap();
        let topo = find_crossings(&g, &c).unwrap();
        for line in topo.x_lines.iter().chain(&topo.y_lines) {
            let fixed = g.coord(line.line_index);
            for cr in &line.crossings {
                let exact = (0.25 - fixed * fixed).sqrt().copysign(cr.cut);
                assert!((cr.cut - exact).abs() <= 1e-12, "{} vs {}", cr.cut, exact);
                let (x, y) = cr.point(&g);
                assert!(c.level(x, y).abs() <= 1e-10 * g.h());
            }
        }
    }

    #[test]
    fn corner_pairs_are_detected() {
        // N = 21 on the unit circle with D = 1.99 produces corner lines.
        let g = grid(1.99, 21);
        let c = InterfaceModel::circle(1.0).unwrap();
        let topo = find_crossings(&g, &c).unwrap();
        assert!(topo.corner_count() > 0);
        for line in topo.x_lines.iter().chain(&topo.y_lines) {
            for (k, p) in line.pairings.iter().enumerate() {
                let between = line.crossings[k + 1].left_node + 1 - line.crossings[k].right_node;
                match p {
                    Pairing::Corner => assert_eq!(between, 1),
                    Pairing::Regular => assert!(between >= 2),
                    Pairing::RefineNeeded => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn grazing_line_requires_refinement() {
        // n = 10 puts nodes at y = +-1/9 around the axis; the line x = x_7 = 5/9 meets a
        // circle of radius 0.56 at y = +-0.0705, both between those two nodes.
        let g = grid(1.0, 10);
        let c = InterfaceModel::circle(0.56).unwrap();
        match find_crossings(&g, &c).unwrap_err() {
            Error::RefinementRequired { first, second, .. } => {
                assert!((second - first - 2.0 / 9.0).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn crossings_are_deterministic() {
        let g = grid(0.99, 41);
        let leaf = InterfaceModel::polar_leaf(4, 0.1).unwrap();
        let a = find_crossings(&g, &leaf).unwrap();
        let b = find_crossings(&g, &leaf).unwrap();
        assert_eq!(a, b);
    }
}
