//! Sparse and dense linear algebra for desk-scale problems.

mod dense;
mod eig;
mod gsv;
mod solve;
mod sparse;

pub use dense::DenseMatrix;
pub use eig::{gen_sym_eig, sym_eig, Eigen};
pub use gsv::{smallest_gsv, GeneralizedSingular};
pub use solve::{relative_residual, solve_general, solve_spd, Method, Solution, SolveOptions, LU_FALLBACK_CAP};
pub use sparse::{SparseMatrix, TripletBuilder};

/// Largest dimension handled by the dense spectral routines.
pub const DENSE_CAP: usize = 2500;
