//! Interface-aware stencils.

pub mod fictitious;
pub mod jump;
pub mod tangential;

pub use fictitious::{solve_corner_fictitious, solve_regular_fictitious, FictitiousStencil};
pub use jump::{decomposed_flux_jump, FluxJumpCoefficients, InterfaceValues};
pub use tangential::{
    build_tangential_stencil, build_transverse_tangential_stencil, tangential_stencil_with_fallback, TangentialRoute,
    TangentialStencil,
};
