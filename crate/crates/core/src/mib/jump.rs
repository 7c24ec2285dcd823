//! Per-axis form of the flux jump condition.
//!
//! With `tau = (-sin theta, cos theta)` the Cartesian flux jumps are
//! `[alpha u_x] = cos(theta) psi - sin(theta) [alpha u_tau]` and
//! `[alpha u_y] = sin(theta) psi + cos(theta) [alpha u_tau]`, where the tangential
//! flux jump is rewritten with a one-sided tangential derivative and the known
//! jump `[u_tau] = phi_tau`.

use crate::geometry::{Axis, Side};

/// Jump values at one interface point and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceValues {
    pub phi: f64,
    pub psi: f64,
    pub phi_tau: f64,
}

/// Coefficients of `[alpha u_axis] = c_psi psi + c_tau u_tau + c_phi_tau phi_tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxJumpCoefficients {
    pub psi: f64,
    pub u_tau: f64,
    pub phi_tau: f64,
}

impl FluxJumpCoefficients {
    /// `tau_side` is the subdomain the tangential derivative is taken from.
    pub fn new(axis: Axis, theta: f64, tau_side: Side, alpha_minus: f64, alpha_plus: f64) -> Self {
        let (normal, tangential) = match axis {
            Axis::X => (theta.cos(), -theta.sin()),
            Axis::Y => (theta.sin(), theta.cos()),
        };
        // [alpha u_tau] = (a+ - a-) u+_tau + a- phi_tau = (a+ - a-) u-_tau + a+ phi_tau
        let alpha_jump = match tau_side {
            Side::Plus => alpha_minus,
            Side::Minus => alpha_plus,
        };
        Self {
            psi: normal,
            u_tau: tangential * (alpha_plus - alpha_minus),
            phi_tau: tangential * alpha_jump,
        }
    }

    pub fn eval(&self, values: &InterfaceValues, u_tau: f64) -> f64 {
        self.psi * values.psi + self.u_tau * u_tau + self.phi_tau * values.phi_tau
    }
}

/// `[alpha u_x]` (axis X) or `[alpha u_y]` (axis Y) from the normal flux jump and
/// the plus-side tangential derivative.
pub fn decomposed_flux_jump(
    axis: Axis,
    theta: f64,
    values: &InterfaceValues,
    u_tau_plus: f64,
    alpha_minus: f64,
    alpha_plus: f64,
) -> f64 {
    FluxJumpCoefficients::new(axis, theta, Side::Plus, alpha_minus, alpha_plus).eval(values, u_tau_plus)
}
