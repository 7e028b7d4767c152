//! Finite-element laboratory for qualitative spectral geometry on triangles.
//!
//! The crate computes low Neumann and mixed Dirichlet–Neumann eigenpairs of
//! the Laplacian on arbitrary triangles with conforming P1/P2 elements on
//! nested uniform meshes, then interrogates the eigenfunctions for
//! qualitative structure: critical-point censuses, nodal curves, directional
//! monotonicity, reflection dominance and vertex-value orderings. A second
//! layer verifies eigenvalue comparison chains and closed-form bounds that
//! govern where diameter-normalized low eigenvalues can sit.
//!
//! Module map:
//! * [`geometry`] — triangles, canonical placement, bisectors, reflection axes
//! * [`special`] — Bessel `J0`/`J1` and the first `J0` zero
//! * [`polynomial`] — exact integer/rational polynomial arithmetic
//! * [`meshing`] — nested uniform triangulations with tagged boundary sides
//! * [`assembly`] — P1/P2 stiffness and mass matrices, boundary reduction
//! * [`linalg`] — sparse symmetric storage, banded Cholesky, dense Jacobi
//! * [`eigensolve`] — shift-invert Lanczos, mesh-refinement extrapolation
//! * [`spectral`] — eigenfunction fields and qualitative-structure analysis
//! * [`inequalities`] — eigenvalue comparison chains and closed-form bounds
//! * [`continuation`] — eigenvalue tracking along triangle-family paths
//! * [`report`] — deterministic JSON/CSV serialization
//! * [`cli`] — command-line front end

pub mod assembly;
pub mod cli;
pub mod continuation;
pub mod eigensolve;
pub mod geometry;
pub mod inequalities;
pub mod linalg;
pub mod meshing;
pub mod polynomial;
pub mod report;
pub mod special;
pub mod spectral;

pub use geometry::{Point, Side, Triangle};
