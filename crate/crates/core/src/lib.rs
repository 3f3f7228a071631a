//! Interior penalty discontinuous Galerkin laboratory for the Poisson problem
//! on the unit square.
//!
//! The crate builds conforming (and graded) triangular meshes, an orthonormal
//! broken polynomial space on them, the interior penalty bilinear form
//! together with the mesh-dependent norms it is analysed in, and the
//! spectral machinery that measures discrete stability constants
//! (inf-sup, coercivity, continuity). [`analysis`] ties these together into
//! solves, Ritz projections and convergence studies.

pub mod analysis;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod mesh;
pub mod space;

pub use error::{Error, Result};

/// A point (or vector) in the plane.
pub type Point = [f64; 2];
