//! Built-in manufactured-solution benchmarks.
//!
//! Every exact solution has the form `u = P(x, y) cos t + Q(x, y)` on each side,
//! so the source `f = u_t - alpha * lap u` is separable into `sin t`, `cos t` and
//! constant factors, and the jump data follow from the two branches and the
//! interface normal.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Grid2D, InterfaceModel, Side};
use crate::problem::{JumpData, PiecewiseFn, ProblemSpec, SeparableTerm, SourceTerm};

/// `(side, x, y) -> [value, d/dx, d/dy, laplacian]`
pub type Profile = Arc<dyn Fn(Side, f64, f64) -> [f64; 4] + Send + Sync>;

const WAVENUMBER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    Example1,
    Example2,
    Example3,
    Example4,
    Example5a,
    Example5b,
}

impl CaseId {
    pub const ALL: [CaseId; 6] = [
        CaseId::Example1,
        CaseId::Example2,
        CaseId::Example3,
        CaseId::Example4,
        CaseId::Example5a,
        CaseId::Example5b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Example1 => "ex1",
            CaseId::Example2 => "ex2",
            CaseId::Example3 => "ex3",
            CaseId::Example4 => "ex4",
            CaseId::Example5a => "ex5a",
            CaseId::Example5b => "ex5b",
        }
    }

    pub fn default_alphas(self) -> (f64, f64) {
        match self {
            CaseId::Example2 => (2.0, 10.0),
            _ => (1.0, 10.0),
        }
    }

    pub fn final_time(self) -> f64 {
        match self {
            CaseId::Example1 => 2.0,
            _ => 1.0,
        }
    }

    /// Step size used for spatial convergence studies.
    pub fn spatial_study_dt(self) -> f64 {
        match self {
            CaseId::Example1 | CaseId::Example2 | CaseId::Example3 => 1e-4,
            CaseId::Example4 => 1e-6,
            CaseId::Example5a => 2.5e-6,
            CaseId::Example5b => 1e-5,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        let key = key.strip_prefix("example").map(|k| format!("ex{k}")).unwrap_or(key);
        let key = if key.starts_with(|c: char| c.is_ascii_digit()) { format!("ex{key}") } else { key };
        CaseId::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown case '{s}' (expected one of ex1, ex2, ex3, ex4, ex5a, ex5b)")))
    }
}

/// `u = P cos t + Q` with piecewise profiles.
#[derive(Clone)]
pub struct ExactSolution {
    pub oscillating: Profile,
    pub steady: Profile,
}

impl ExactSolution {
    pub fn value(&self, side: Side, x: f64, y: f64, t: f64) -> f64 {
        (self.oscillating)(side, x, y)[0] * t.cos() + (self.steady)(side, x, y)[0]
    }

    pub fn gradient(&self, side: Side, x: f64, y: f64, t: f64) -> (f64, f64) {
        let p = (self.oscillating)(side, x, y);
        let q = (self.steady)(side, x, y);
        (p[1] * t.cos() + q[1], p[2] * t.cos() + q[2])
    }

    pub fn time_derivative(&self, side: Side, x: f64, y: f64, t: f64) -> f64 {
        -(self.oscillating)(side, x, y)[0] * t.sin()
    }

    pub fn laplacian(&self, side: Side, x: f64, y: f64, t: f64) -> f64 {
        (self.oscillating)(side, x, y)[3] * t.cos() + (self.steady)(side, x, y)[3]
    }
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactSolution { .. }")
    }
}

#[derive(Debug, Clone)]
pub struct ExampleCase {
    pub id: CaseId,
    pub half_width: f64,
    pub interface: InterfaceModel,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub final_time: f64,
    pub exact: ExactSolution,
}

fn zero_profile() -> Profile {
    Arc::new(|_, _, _| [0.0; 4])
}

fn constant_profile(c: f64) -> Profile {
    Arc::new(move |_, _, _| [c, 0.0, 0.0, 0.0])
}

/// `sin kx cos ky` inside, `cos kx sin ky` outside.
fn swapped_wave_profile() -> Profile {
    let k = WAVENUMBER;
    Arc::new(move |side, x, y| {
        let (sx, cx) = (k * x).sin_cos();
        let (sy, cy) = (k * y).sin_cos();
        match side {
            Side::Minus => [sx * cy, k * cx * cy, -k * sx * sy, -2.0 * k * k * sx * cy],
            Side::Plus => [cx * sy, -k * sx * sy, k * cx * cy, -2.0 * k * k * cx * sy],
        }
    })
}

impl ExampleCase {
    pub fn new(id: CaseId) -> Self {
        let (am, ap) = id.default_alphas();
        Self::with_alphas(id, am, ap).expect("default coefficients are valid")
    }

    pub fn with_alphas(id: CaseId, alpha_minus: f64, alpha_plus: f64) -> Result<Self> {
        for a in [alpha_minus, alpha_plus] {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidInput(format!("diffusion coefficients must be positive, got {a}")));
            }
        }
        let (am, ap) = (alpha_minus, alpha_plus);
        let (half_width, interface, exact) = match id {
            CaseId::Example1 => {
                let p: Profile = Arc::new(move |side, x, y| {
                    let r2 = x * x + y * y;
                    match side {
                        Side::Minus => {
                            let r4 = r2 * r2;
                            [(r4 * r2 - 1.0) / am - 3.0 / ap, 6.0 * r4 * x / am, 6.0 * r4 * y / am, 36.0 * r4 / am]
                        }
                        Side::Plus => {
                            let r4 = r2 * r2;
                            [-3.0 / (ap * r2), 6.0 * x / (ap * r4), 6.0 * y / (ap * r4), -12.0 / (ap * r4)]
                        }
                    }
                });
                (1.99, InterfaceModel::circle(1.0)?, ExactSolution { oscillating: p, steady: zero_profile() })
            }
            CaseId::Example2 => {
                let q: Profile = Arc::new(move |side, x, y| {
                    let r2 = x * x + y * y;
                    match side {
                        Side::Minus => [r2 - 1.0, 2.0 * x, 2.0 * y, 4.0],
                        Side::Plus => {
                            // d/dx (r^4/2 + r^2) = (2 r^2 + 2) x
                            let g = (2.0 * r2 + 2.0) / ap;
                            [
                                0.25 * (1.0 - 9.0 / (8.0 * ap)) + (0.5 * r2 * r2 + r2) / ap,
                                g * x,
                                g * y,
                                (8.0 * r2 + 4.0) / ap,
                            ]
                        }
                    }
                });
                (0.99, InterfaceModel::circle(0.5)?, ExactSolution { oscillating: constant_profile(1.0), steady: q })
            }
            CaseId::Example3 => {
                let k = WAVENUMBER;
                let q: Profile = Arc::new(move |side, x, y| match side {
                    Side::Minus => {
                        let r2 = x * x + y * y;
                        let e = r2.exp();
                        [e, 2.0 * x * e, 2.0 * y * e, 4.0 * e * (r2 + 1.0)]
                    }
                    Side::Plus => {
                        let (sx, cx) = (k * x).sin_cos();
                        let (sy, cy) = (k * y).sin_cos();
                        [sx * cy, k * cx * cy, -k * sx * sy, -2.0 * k * k * sx * cy]
                    }
                });
                (0.99, InterfaceModel::circle(0.5)?, ExactSolution { oscillating: constant_profile(1.0), steady: q })
            }
            CaseId::Example4 => (
                0.99,
                InterfaceModel::circle(0.5)?,
                ExactSolution { oscillating: swapped_wave_profile(), steady: zero_profile() },
            ),
            CaseId::Example5a => (
                0.99,
                InterfaceModel::polar_leaf(2, 0.25)?,
                ExactSolution { oscillating: swapped_wave_profile(), steady: zero_profile() },
            ),
            CaseId::Example5b => (
                0.99,
                InterfaceModel::polar_leaf(4, 0.1)?,
                ExactSolution { oscillating: swapped_wave_profile(), steady: zero_profile() },
            ),
        };
        Ok(Self {
            id,
            half_width,
            interface,
            alpha_minus: am,
            alpha_plus: ap,
            final_time: id.final_time(),
            exact,
        })
    }

    pub fn alpha(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.alpha_minus,
            Side::Plus => self.alpha_plus,
        }
    }

    pub fn grid(&self, n: usize) -> Result<Grid2D> {
        Grid2D::new(self.half_width, n)
    }

    pub fn exact_fn(&self) -> PiecewiseFn {
        let exact = self.exact.clone();
        Arc::new(move |side, x, y, t| exact.value(side, x, y, t))
    }

    /// `f = u_t - alpha lap u`, split into `sin t`, `cos t` and constant factors.
    pub fn source(&self) -> SourceTerm {
        let (am, ap) = (self.alpha_minus, self.alpha_plus);
        let alpha = move |s: Side| if s == Side::Minus { am } else { ap };
        let p = self.exact.oscillating.clone();
        let p2 = p.clone();
        let q = self.exact.steady.clone();
        SourceTerm::Separable(vec![
            SeparableTerm {
                spatial: Arc::new(move |s, x, y| -p(s, x, y)[0]),
                temporal: Arc::new(f64::sin),
            },
            SeparableTerm {
                spatial: Arc::new(move |s, x, y| -alpha(s) * p2(s, x, y)[3]),
                temporal: Arc::new(f64::cos),
            },
            SeparableTerm {
                spatial: Arc::new(move |s, x, y| -alpha(s) * q(s, x, y)[3]),
                temporal: Arc::new(|_| 1.0),
            },
        ])
    }

    /// Jump data from the two branches of the exact solution.
    pub fn jumps(&self) -> JumpData {
        let (am, ap) = (self.alpha_minus, self.alpha_plus);
        let iface = self.interface;
        let normal = move |x: f64, y: f64| {
            let (gx, gy) = iface.gradient(x, y);
            let m = gx.hypot(gy);
            (gx / m, gy / m)
        };
        let e1 = self.exact.clone();
        let e2 = self.exact.clone();
        let e3 = self.exact.clone();
        JumpData {
            phi: Arc::new(move |x, y, t| e1.value(Side::Plus, x, y, t) - e1.value(Side::Minus, x, y, t)),
            psi: Arc::new(move |x, y, t| {
                let (nx, ny) = normal(x, y);
                let gp = e2.gradient(Side::Plus, x, y, t);
                let gm = e2.gradient(Side::Minus, x, y, t);
                ap * (gp.0 * nx + gp.1 * ny) - am * (gm.0 * nx + gm.1 * ny)
            }),
            phi_tau: Arc::new(move |x, y, t| {
                let (nx, ny) = normal(x, y);
                let gp = e3.gradient(Side::Plus, x, y, t);
                let gm = e3.gradient(Side::Minus, x, y, t);
                -(gp.0 - gm.0) * ny + (gp.1 - gm.1) * nx
            }),
        }
    }

    pub fn problem(&self, n: usize) -> Result<ProblemSpec> {
        let exact = self.exact_fn();
        Ok(ProblemSpec {
            grid: self.grid(n)?,
            interface: self.interface,
            alpha_minus: self.alpha_minus,
            alpha_plus: self.alpha_plus,
            source: self.source(),
            boundary: exact.clone(),
            initial: Arc::new(move |s, x, y, _| exact(s, x, y, 0.0)),
            jumps: self.jumps(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fd_laplacian(e: &ExactSolution, side: Side, x: f64, y: f64, t: f64) -> f64 {
        let h = 1e-3;
        let u = |a: f64, b: f64| e.value(side, a, b, t);
        (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4.0 * u(x, y)) / (h * h)
    }

    #[test]
    fn parse_names() {
        assert_eq!("ex5b".parse::<CaseId>().unwrap(), CaseId::Example5b);
        assert_eq!("Example3".parse::<CaseId>().unwrap(), CaseId::Example3);
        assert_eq!("1".parse::<CaseId>().unwrap(), CaseId::Example1);
        assert_eq!("5b".parse::<CaseId>().unwrap(), CaseId::Example5b);
        assert!("5".parse::<CaseId>().is_err());
        assert!("ex6".parse::<CaseId>().is_err());
    }

    #[test]
    fn profiles_match_finite_differences() {
        for id in CaseId::ALL {
            let case = ExampleCase::new(id);
            for &(x, y) in &[(0.1, 0.2), (-0.3, 0.05), (0.8, -0.6), (0.35, 0.7)] {
                for side in [Side::Minus, Side::Plus] {
                    let t: f64 = 0.7;
                    let lap = case.exact.laplacian(side, x, y, t);
                    let fd = fd_laplacian(&case.exact, side, x, y, t);
                    assert!((lap - fd).abs() < 1e-4 * (1.0 + lap.abs()), "{id} {side:?} lap {lap} fd {fd}");
                    let h = 1e-6;
                    let (gx, _) = case.exact.gradient(side, x, y, t);
                    let fdx = (case.exact.value(side, x + h, y, t) - case.exact.value(side, x - h, y, t)) / (2.0 * h);
                    assert!((gx - fdx).abs() < 1e-6 * (1.0 + gx.abs()));
                }
            }
        }
    }

    #[test]
    fn sources_match_published_formulas() {
        let t: f64 = 0.4;
        let (x, y) = (0.3, -0.2);
        let r2: f64 = x * x + y * y;
        let f = |id: CaseId, side: Side| ExampleCase::new(id).source().eval(side, x, y, t);

        let a = ((r2.powi(3) - 1.0) / 1.0 - 3.0 / 10.0, r2.powi(2));
        assert!((f(CaseId::Example1, Side::Minus) - (-a.0 * t.sin() - 36.0 * a.1 * t.cos())).abs() < 1e-12);
        let plus = 3.0 / (10.0 * r2) * t.sin() + 12.0 / (r2 * r2) * t.cos();
        assert!((f(CaseId::Example1, Side::Plus) - plus).abs() < 1e-12);

        assert!((f(CaseId::Example2, Side::Minus) - (-t.sin() - 8.0)).abs() < 1e-12);
        assert!((f(CaseId::Example2, Side::Plus) - (-t.sin() - 8.0 * r2 - 4.0)).abs() < 1e-12);

        let k = 2.0;
        let e3m = -t.sin() - 4.0 * r2.exp() * (r2 + 1.0);
        let e3p = -t.sin() + 20.0 * k * k * (k * x).sin() * (k * y).cos();
        assert!((f(CaseId::Example3, Side::Minus) - e3m).abs() < 1e-12);
        assert!((f(CaseId::Example3, Side::Plus) - e3p).abs() < 1e-12);

        let e4p = (2.0 * k * k * 10.0 * t.cos() - t.sin()) * (k * x).cos() * (k * y).sin();
        assert!((f(CaseId::Example4, Side::Plus) - e4p).abs() < 1e-12);
    }

    #[test]
    fn published_jump_values() {
        let c2 = ExampleCase::new(CaseId::Example2).jumps();
        for th in [0.0, 1.0, 2.5, 4.0] {
            let (x, y) = (0.5 * f64::cos(th), 0.5 * f64::sin(th));
            assert!(((c2.phi)(x, y, 0.3) - 1.0).abs() < 1e-13);
            assert!(((c2.psi)(x, y, 0.3) + 0.75).abs() < 1e-13);
            assert!((c2.phi_tau)(x, y, 0.3).abs() < 1e-13);
        }

        let k = 2.0;
        let j4 = ExampleCase::new(CaseId::Example4).jumps();
        for th in [0.3, PI / 4.0, 2.0, 5.5] {
            let (c, s) = (f64::cos(th), f64::sin(th));
            let (x, y) = (0.5 * c, 0.5 * s);
            let t: f64 = 0.9;
            let (sa, ca) = ((k / 2.0 * c).sin(), (k / 2.0 * c).cos());
            let (sb, cb) = ((k / 2.0 * s).sin(), (k / 2.0 * s).cos());
            let phi = (ca * sb - sa * cb) * t.cos();
            let psi = k * t.cos() * (1.0 * s - 10.0 * c) * sa * sb + k * t.cos() * (10.0 * s - 1.0 * c) * ca * cb;
            let tau = k * t.cos() * (c + s) * (ca * cb + sa * sb);
            assert!(((j4.phi)(x, y, t) - phi).abs() < 1e-12);
            assert!(((j4.psi)(x, y, t) - psi).abs() < 1e-12);
            assert!(((j4.phi_tau)(x, y, t) - tau).abs() < 1e-12);
        }

        let j3 = ExampleCase::new(CaseId::Example3).jumps();
        let th: f64 = 1.1;
        let (c, s) = (th.cos(), th.sin());
        let (sa, ca) = ((k / 2.0 * c).sin(), (k / 2.0 * c).cos());
        let (sb, cb) = ((k / 2.0 * s).sin(), (k / 2.0 * s).cos());
        let (x, y) = (0.5 * c, 0.5 * s);
        let e = 0.25f64.exp();
        assert!(((j3.phi)(x, y, 0.0) - (sa * cb - e)).abs() < 1e-12);
        let psi = 10.0 * k * c * ca * cb - 10.0 * k * s * sa * sb - e;
        assert!(((j3.psi)(x, y, 0.0) - psi).abs() < 1e-12);
        let tau = -k * s * ca * cb - k * c * sa * sb;
        assert!(((j3.phi_tau)(x, y, 0.0) - tau).abs() < 1e-12);
    }

    #[test]
    fn boundary_lies_in_plus_region() {
        for id in CaseId::ALL {
            let case = ExampleCase::new(id);
            let hw = case.half_width;
            for s in [-hw, -0.3 * hw, 0.0, 0.6 * hw, hw] {
                for (x, y) in [(s, hw), (s, -hw), (hw, s), (-hw, s)] {
                    assert_eq!(case.interface.side_at(x, y), Side::Plus);
                }
            }
        }
    }
}
