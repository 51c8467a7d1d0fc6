//! High-order finite-element fields on simplicial meshes and the tools to
//! look at them correctly: point evaluation, 2D grid sampling and
//! maximum-intensity-projection rendering.
//!
//! ```
//! use std::sync::Arc;
//! use fevis::{expr, mesh, space};
//!
//! let m = Arc::new(mesh::unit_square_mesh(2, 2, [1.0, 1.0]).unwrap());
//! let v = space::function_space(m, "P", 3).unwrap();
//! let f = space::FeField::interpolate(&v, &expr::parse("x[0]*x[0]*(1-x[0])", 2).unwrap())
//!     .unwrap();
//! let peak = f.eval_point(&[2.0 / 3.0, 0.5]).unwrap();
//! assert!((peak - 4.0 / 27.0).abs() < 1e-12);
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod element;
pub mod expr;
pub mod mesh;
pub mod render;
pub mod solver;
pub mod space;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] mesh::MeshError),
    #[error(transparent)]
    Element(#[from] element::ElementError),
    #[error(transparent)]
    Expr(#[from] expr::ExprError),
    #[error(transparent)]
    Space(#[from] space::SpaceError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Render(#[from] render::RenderError),
    #[error(transparent)]
    Container(#[from] space::ContainerError),
}
