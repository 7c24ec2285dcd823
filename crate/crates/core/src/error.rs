use thiserror::Error;

use crate::geometry::Axis;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "grid refinement required on {axis} line {line}: interface cuts near {first:.6} and {second:.6} enclose no grid node"
    )]
    RefinementRequired {
        axis: Axis,
        line: usize,
        first: f64,
        second: f64,
    },

    #[error("{axis} line {line} cuts the interface {count} times; at most two cuts per line are supported")]
    TooManyCrossings { axis: Axis, line: usize, count: usize },

    #[error("interface normal is undefined at ({x:.6}, {y:.6}): gradient magnitude {magnitude:e}")]
    DegenerateNormal { x: f64, y: f64, magnitude: f64 },

    #[error("finite difference abscissae must be distinct")]
    DuplicateAbscissae,

    #[error("stencil unavailable at interface point ({x:.6}, {y:.6}): {reason}")]
    StencilUnavailable { x: f64, y: f64, reason: String },

    #[error("tangent at ({x:.6}, {y:.6}) (theta = {theta:.6}) is parallel to the neighbouring grid lines")]
    TangentDegenerate { x: f64, y: f64, theta: f64 },

    #[error("singular MIB system on {axis} line {line} near node {node}: |det| = {det:e}")]
    SingularMibSystem {
        axis: Axis,
        line: usize,
        node: usize,
        det: f64,
    },

    #[error("zero pivot at row {row}")]
    ZeroPivot { row: usize },

    #[error("entry ({row}, {col}) does not fit the declared perturbation pattern")]
    PatternMismatch { row: usize, col: usize },

    #[error("Woodbury capacitance matrix is singular")]
    SingularCapacitance,

    #[error("eigenvalue iteration did not converge after {iterations} restarts (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error(
        "iterative solve did not converge: relative residual {residual:e} > {tolerance:e} after {iterations} iterations"
    )]
    IterativeSolveNoConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("least-squares fit needs at least two points, got {points}")]
    FitUnderdetermined { points: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
