//! Matched ADI solver for two-dimensional heat equations with material interfaces.

pub mod adi;
pub mod cases;
pub mod csvio;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod linalg;
pub mod mib;
pub mod operators;
pub mod problem;
pub mod stability;
pub mod study;

pub use error::{Error, Result};
