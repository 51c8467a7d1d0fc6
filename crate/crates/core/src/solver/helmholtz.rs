use std::f64::consts::PI;
use std::sync::Arc;

use super::{assemble_helmholtz, cg_solve, l2_error, DEFAULT_REL_TOL};
use crate::expr::parse;
use crate::mesh::Mesh;
use crate::space::{Family, FeField, FunctionSpace, SpaceError};
use crate::Error;

/// Forcing whose exact solution is [`HELMHOLTZ_EXACT`]: substituting
/// `u = cos(2 pi x) cos(2 pi y)` into `-lap(u) + u` gives `(1 + 8 pi^2) u`.
pub const HELMHOLTZ_FORCING: &str = "(1.0+8.0*pi^2)*cos(2*pi*x[0])*cos(2*pi*x[1])";
pub const HELMHOLTZ_EXACT: &str = "cos(2*pi*x[0])*cos(2*pi*x[1])";

#[derive(Debug, Clone)]
pub struct HelmholtzSolution {
    pub field: FeField,
    pub iterations: usize,
    pub relative_residual: f64,
}

impl HelmholtzSolution {
    /// L2 distance to `cos(2 pi x) cos(2 pi y)`.
    pub fn l2_error(&self) -> f64 {
        l2_error(&self.field, exact).expect("degree-2k+2 rule exists for supported k")
    }
}

fn exact(x: &[f64]) -> f64 {
    (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).cos()
}

/// Solves `-lap(u) + u = f` on a 2D mesh with continuous `P_k`: interpolate
/// the forcing into the space, assemble, run CG to relative residual 1e-10.
pub fn solve_helmholtz(mesh: Arc<Mesh>, k: usize) -> Result<HelmholtzSolution, Error> {
    if mesh.dim() != 2 {
        return Err(SpaceError::DimensionMismatch {
            expected: 2,
            got: mesh.dim(),
        }
        .into());
    }
    let space = Arc::new(FunctionSpace::new(mesh, Family::CG, k)?);
    let forcing = parse(HELMHOLTZ_FORCING, 2)?;
    let f = FeField::interpolate(&space, &forcing)?;
    let system = assemble_helmholtz(&space, &f)?;
    let max_iter = 10 * space.global_dof_count();
    let out = cg_solve(&system.matrix, &system.rhs, DEFAULT_REL_TOL, max_iter)?;
    Ok(HelmholtzSolution {
        field: FeField::new(space, out.solution)?,
        iterations: out.iterations,
        relative_residual: out.relative_residual,
    })
}
