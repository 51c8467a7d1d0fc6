//! Continuous Lagrange function spaces and the scalar fields that live on
//! them.

mod container;
mod dofs;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::element::{ElementError, LagrangeElement, MAX_DEGREE};
use crate::expr::{Expr, ExprError};
use crate::mesh::{build_spatial_index, default_buckets_per_axis, locate_cell, Mesh, SpatialIndex};
use crate::solver::{self, SolverError};

pub use container::{load_field, read_field, save_field, write_field, ContainerError, FIELD_MAGIC};

const MAX_LOCAL_DOFS: usize = (MAX_DEGREE + 1) * (MAX_DEGREE + 2) * (MAX_DEGREE + 3) / 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("unsupported element family `{0}` (only continuous Lagrange \"P\"/\"CG\")")]
    UnsupportedFamily(String),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error("point {0:?} lies outside the mesh")]
    OutOfDomain(Vec<f64>),
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("coefficient {index} is not finite")]
    NonFiniteCoefficient { index: usize },
    #[error("interpolation failed at DOF {dof} {coords:?}: {source}")]
    Interpolation {
        dof: usize,
        coords: Vec<f64>,
        source: ExprError,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Element family label. `P` and `CG` both mean continuous Lagrange.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    P,
    CG,
}

impl FromStr for Family {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" => Ok(Family::P),
            "CG" => Ok(Family::CG),
            other => Err(SpaceError::UnsupportedFamily(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::P => "P",
            Family::CG => "CG",
        })
    }
}

/// Mesh plus Lagrange element plus a global numbering of the nodes.
#[derive(Debug, Clone)]
pub struct FunctionSpace {
    mesh: Arc<Mesh>,
    family: Family,
    element: LagrangeElement,
    index: SpatialIndex,
    dof_map: Vec<usize>,
    dof_coords: Vec<[f64; 3]>,
}

pub fn function_space(
    mesh: Arc<Mesh>,
    family: &str,
    k: usize,
) -> Result<Arc<FunctionSpace>, SpaceError> {
    FunctionSpace::new(mesh, family.parse()?, k).map(Arc::new)
}

impl FunctionSpace {
    pub fn new(mesh: Arc<Mesh>, family: Family, k: usize) -> Result<Self, SpaceError> {
        let element = LagrangeElement::new(mesh.dim(), k)?;
        let numbering = dofs::number_dofs(&mesh, &element);
        let index = build_spatial_index(&mesh, default_buckets_per_axis(&mesh));
        Ok(FunctionSpace {
            mesh,
            family,
            element,
            index,
            dof_map: numbering.dof_map,
            dof_coords: numbering.coords,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn element(&self) -> &LagrangeElement {
        &self.element
    }

    pub fn spatial_index(&self) -> &SpatialIndex {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    pub fn degree(&self) -> usize {
        self.element.degree()
    }

    pub fn global_dof_count(&self) -> usize {
        self.dof_coords.len()
    }

    /// Global DOF indices of a cell, in local node order.
    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        let n = self.element.ndofs();
        &self.dof_map[cell * n..(cell + 1) * n]
    }

    pub fn dof_coords(&self, dof: usize) -> &[f64] {
        &self.dof_coords[dof][..self.dim()]
    }

    /// Lowest-index cell containing `point`.
    pub fn locate(&self, point: &[f64]) -> Option<usize> {
        if point.len() != self.dim() {
            return None;
        }
        locate_cell(&self.mesh, &self.index, point)
    }
}

/// A scalar finite-element field: coefficients against a function space's
/// global basis.
#[derive(Debug, Clone)]
pub struct FeField {
    space: Arc<FunctionSpace>,
    coeffs: Vec<f64>,
}

/// How [`FeField::degrade_to_linear`] builds its P1 coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegradeMode {
    /// Vertex values of the source field.
    #[default]
    Interpolate,
    /// L2 projection onto P1 (mass-matrix solve).
    L2Project,
}

impl FromStr for DegradeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interpolate" => Ok(DegradeMode::Interpolate),
            "l2project" => Ok(DegradeMode::L2Project),
            other => Err(format!(
                "unknown degrade mode `{other}` (expected interpolate or l2project)"
            )),
        }
    }
}

impl FeField {
    pub fn new(space: Arc<FunctionSpace>, coeffs: Vec<f64>) -> Result<Self, SpaceError> {
        if coeffs.len() != space.global_dof_count() {
            return Err(SpaceError::CoefficientCount {
                expected: space.global_dof_count(),
                got: coeffs.len(),
            });
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(SpaceError::NonFiniteCoefficient { index });
        }
        Ok(FeField { space, coeffs })
    }

    /// Nodal interpolation: each coefficient is the expression at its DOF.
    pub fn interpolate(space: &Arc<FunctionSpace>, ast: &Expr) -> Result<Self, SpaceError> {
        if ast.dim() != space.dim() {
            return Err(SpaceError::DimensionMismatch {
                expected: space.dim(),
                got: ast.dim(),
            });
        }
        let coeffs = (0..space.global_dof_count())
            .map(|g| {
                let x = space.dof_coords(g);
                ast.eval(x).map_err(|source| SpaceError::Interpolation {
                    dof: g,
                    coords: x.to_vec(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FeField {
            space: Arc::clone(space),
            coeffs,
        })
    }

    pub fn space(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    fn check_point(&self, point: &[f64]) -> Result<(), SpaceError> {
        if point.len() != self.dim() {
            return Err(SpaceError::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        Ok(())
    }

    /// True when some cell contains `point`.
    pub fn inside(&self, point: &[f64]) -> bool {
        self.space.locate(point).is_some()
    }

    /// Value at a physical point; points outside the mesh are an error.
    pub fn eval_point(&self, point: &[f64]) -> Result<f64, SpaceError> {
        self.check_point(point)?;
        let cell = self
            .space
            .locate(point)
            .ok_or_else(|| SpaceError::OutOfDomain(point.to_vec()))?;
        Ok(self.eval_in_cell(cell, point))
    }

    /// Value at `point` when it lies in the mesh, `None` otherwise.
    #[inline]
    pub fn probe(&self, point: &[f64]) -> Option<f64> {
        let cell = self.space.locate(point)?;
        Some(self.eval_in_cell(cell, point))
    }

    /// Evaluates the polynomial of `cell` at `point` without checking
    /// containment.
    #[inline]
    pub fn eval_in_cell(&self, cell: usize, point: &[f64]) -> f64 {
        let map = self.space.mesh.geometry(cell);
        let xi = map.to_reference(point);
        let elem = &self.space.element;
        let n = elem.ndofs();
        let mut phi = [0.0; MAX_LOCAL_DOFS];
        elem.eval_basis_into(&xi, &mut phi[..n]);
        self.space
            .cell_dofs(cell)
            .iter()
            .zip(&phi[..n])
            .map(|(&g, &p)| self.coeffs[g] * p)
            .sum()
    }

    /// Physical gradient of the cell polynomial at `point`.
    pub fn gradient_in_cell(&self, cell: usize, point: &[f64]) -> Vec<f64> {
        let map = self.space.mesh.geometry(cell);
        let xi = map.to_reference(point);
        let elem = &self.space.element;
        let d = self.dim();
        let grads = elem.eval_basis_gradients(&xi);
        let mut reference = [0.0; 3];
        for (i, &g) in self.space.cell_dofs(cell).iter().enumerate() {
            for a in 0..d {
                reference[a] += self.coeffs[g] * grads[i * d + a];
            }
        }
        map.push_gradient(&reference)[..d].to_vec()
    }

    pub fn eval_gradient(&self, point: &[f64]) -> Result<Vec<f64>, SpaceError> {
        self.check_point(point)?;
        let cell = self
            .space
            .locate(point)
            .ok_or_else(|| SpaceError::OutOfDomain(point.to_vec()))?;
        Ok(self.gradient_in_cell(cell, point))
    }

    /// Re-expresses the field in P1 on the same mesh.
    pub fn degrade_to_linear(&self, mode: DegradeMode) -> Result<FeField, SpaceError> {
        let p1 = Arc::new(FunctionSpace::new(
            Arc::clone(&self.space.mesh),
            self.space.family,
            1,
        )?);
        let coeffs = match mode {
            DegradeMode::Interpolate => (0..p1.global_dof_count())
                .map(|g| self.eval_point(p1.dof_coords(g)))
                .collect::<Result<Vec<_>, _>>()?,
            DegradeMode::L2Project => {
                let mass = solver::assemble_bilinear(&p1, 0.0, 1.0)?;
                let rhs = solver::assemble_load(&p1, self)?;
                let max_iter = 10 * p1.global_dof_count().max(10);
                solver::cg_solve(&mass, &rhs, 1e-13, max_iter)?.solution
            }
        };
        FeField::new(p1, coeffs)
    }
}

/// Number of global DOFs a continuous `P_k` space would have on a lattice
/// of `counts` cells per axis.
pub fn lattice_dof_count(dim: usize, counts: &[usize], k: usize) -> usize {
    counts[..dim].iter().map(|&n| k * n + 1).product()
}
