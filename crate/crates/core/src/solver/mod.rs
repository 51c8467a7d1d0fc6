//! Quadrature, Galerkin assembly, conjugate gradients, and the Helmholtz
//! driver `-lap(u) + u = f` with natural (zero-flux) boundary conditions.

mod assembly;
mod helmholtz;
mod quadrature;
mod sparse;

use thiserror::Error;

pub use assembly::{assemble_bilinear, assemble_helmholtz, assemble_load, l2_error, LinearSystem};
pub use helmholtz::{solve_helmholtz, HelmholtzSolution, HELMHOLTZ_EXACT, HELMHOLTZ_FORCING};
pub use quadrature::{gauss_legendre_unit, quadrature_rule, QuadratureRule, MAX_QUADRATURE_DEGREE};
pub use sparse::{cg_solve, dot, norm2, CgOutcome, CsrMatrix};

/// CG stopping tolerance used when none is given.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("dimension must be 2 or 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("no quadrature rule of degree {0} (maximum {MAX_QUADRATURE_DEGREE})")]
    UnsupportedQuadrature(usize),
    #[error("size mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fields live on different meshes")]
    MeshMismatch,
    #[error("matrix is not positive definite (breakdown at iteration {iteration})")]
    NotPositiveDefinite { iteration: usize },
    #[error(
        "CG did not converge in {iterations} iterations (relative residual {relative_residual:e})"
    )]
    NotConverged {
        iterations: usize,
        relative_residual: f64,
    },
}
