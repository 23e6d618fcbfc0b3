//! Dense numerics shared by every other module: the [`Matrix`] container,
//! a handful of kernels, a reproducible random stream and the
//! finite-difference gradient oracle.

mod gradcheck;
mod matrix;
mod pca;
mod rng;

pub use gradcheck::{finite_diff_gradient, relative_error};
pub use matrix::{l2_norm, l2_normalize, l2_normalize_row, matmul, mean_rows, Matrix};
pub use pca::principal_components;
pub use rng::SeededRng;

/// Norms at or below this are treated as degenerate by every normalization.
pub const EPS_NORM: f64 = 1e-12;
