//! Line solvers, sparse storage and eigenvalue routines.

pub mod batch;
pub mod dense;
pub mod eigen;
pub mod krylov;
pub mod perturbed;
pub mod sparse;
pub mod tridiag;

pub use eigen::{leading_eigenvalues, EigenOptions, EigenResult, LinearOperator, RitzPair};
pub use perturbed::{reduce_and_solve, woodbury_solve, PatternBlock, PerturbedFactor, PerturbedSystem};
pub use sparse::{CooBuilder, SparseMatrix};
pub use tridiag::{thomas_solve, TridiagonalFactor, TridiagonalMatrix};
