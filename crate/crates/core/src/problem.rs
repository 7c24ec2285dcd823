//! Problem definition: coefficients, data functions and interface jumps.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Grid2D, InterfaceModel, Side};

/// `(side, x, y, t) -> value`; the side selects the branch of a piecewise function.
pub type PiecewiseFn = Arc<dyn Fn(Side, f64, f64, f64) -> f64 + Send + Sync>;
/// `(side, x, y) -> value`
pub type PiecewiseSpatial = Arc<dyn Fn(Side, f64, f64) -> f64 + Send + Sync>;
/// `t -> value`
pub type TemporalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// `(x, y, t) -> value` for points on the interface.
pub type InterfaceFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Jump conditions `[u] = phi`, `[alpha u_n] = psi` and the tangential jump `[u_tau] = phi_tau`.
/// Jumps are taken plus side minus minus side.
#[derive(Clone)]
pub struct JumpData {
    pub phi: InterfaceFn,
    pub psi: InterfaceFn,
    pub phi_tau: InterfaceFn,
}

impl JumpData {
    pub fn zero() -> Self {
        let z: InterfaceFn = Arc::new(|_, _, _| 0.0);
        Self {
            phi: z.clone(),
            psi: z.clone(),
            phi_tau: z,
        }
    }

    pub fn constant(phi: f64, psi: f64) -> Self {
        Self {
            phi: Arc::new(move |_, _, _| phi),
            psi: Arc::new(move |_, _, _| psi),
            phi_tau: Arc::new(|_, _, _| 0.0),
        }
    }
}

impl fmt::Debug for JumpData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("JumpData { .. }")
    }
}

/// One product term `spatial(side, x, y) * temporal(t)`.
#[derive(Clone)]
pub struct SeparableTerm {
    pub spatial: PiecewiseSpatial,
    pub temporal: TemporalFn,
}

/// Source term `f`. A separable form lets the stepper sample the spatial
/// factors once instead of every step.
#[derive(Clone)]
pub enum SourceTerm {
    Pointwise(PiecewiseFn),
    Separable(Vec<SeparableTerm>),
}

impl SourceTerm {
    pub fn zero() -> Self {
        SourceTerm::Separable(Vec::new())
    }

    pub fn eval(&self, side: Side, x: f64, y: f64, t: f64) -> f64 {
        match self {
            SourceTerm::Pointwise(f) => f(side, x, y, t),
            SourceTerm::Separable(terms) => terms
                .iter()
                .map(|term| (term.spatial)(side, x, y) * (term.temporal)(t))
                .sum(),
        }
    }
}

impl fmt::Debug for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceTerm::Pointwise(_) => f.write_str("SourceTerm::Pointwise"),
            SourceTerm::Separable(t) => write!(f, "SourceTerm::Separable({} terms)", t.len()),
        }
    }
}

/// A heat interface problem on a square grid with Dirichlet data.
#[derive(Clone)]
pub struct ProblemSpec {
    pub grid: Grid2D,
    pub interface: InterfaceModel,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub source: SourceTerm,
    pub boundary: PiecewiseFn,
    pub initial: PiecewiseFn,
    pub jumps: JumpData,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("grid", &self.grid)
            .field("interface", &self.interface)
            .field("alpha_minus", &self.alpha_minus)
            .field("alpha_plus", &self.alpha_plus)
            .field("source", &self.source)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha_minus", self.alpha_minus), ("alpha_plus", self.alpha_plus)] {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {a}")));
            }
        }
        Ok(())
    }

    pub fn alpha(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.alpha_minus,
            Side::Plus => self.alpha_plus,
        }
    }

    /// Copy of the problem on a different mesh.
    pub fn with_grid(&self, grid: Grid2D) -> Self {
        Self {
            grid,
            ..self.clone()
        }
    }
}
