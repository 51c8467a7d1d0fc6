//! Visual consumers of scalar fields: 2D grid sampling, ray-marched maximum
//! intensity projection, difference images, and NRRD/PGM output.

mod camera;
mod image;
mod mip;
mod sample;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::expr::Expr;
use crate::space::FeField;

pub use camera::Camera;
pub use image::{
    diff_image, nrrd_header, pgm_bytes, read_nrrd, write_nrrd, write_pgm, ImageGrid, Window,
};
pub use mip::{mip_render, ClipSphere, RenderConfig};
pub use sample::sample2d;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("invalid render configuration: {0}")]
    InvalidConfig(String),
    #[error("expected a {expected}D field, got {got}D")]
    FieldDimension { expected: usize, got: usize },
    #[error("image sizes differ: {a:?} vs {b:?}")]
    SizeMismatch {
        a: (usize, usize),
        b: (usize, usize),
    },
    #[error("image contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: malformed NRRD: {message}")]
    Format { path: PathBuf, message: String },
}

/// Anything that can be probed at a physical point. `probe` returns `None`
/// outside the field's domain.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn probe(&self, point: &[f64]) -> Option<f64>;
}

impl ScalarField for FeField {
    fn dim(&self) -> usize {
        FeField::dim(self)
    }

    #[inline]
    fn probe(&self, point: &[f64]) -> Option<f64> {
        FeField::probe(self, point)
    }
}

/// An expression evaluated directly, restricted to an axis-aligned box.
/// The reference against which FE renderings are compared.
#[derive(Debug, Clone)]
pub struct AnalyticField {
    expr: Expr,
    lo: [f64; 3],
    hi: [f64; 3],
}

impl AnalyticField {
    pub fn new(expr: Expr, lo: &[f64], hi: &[f64]) -> Self {
        let d = expr.dim();
        let mut l = [0.0; 3];
        let mut h = [0.0; 3];
        l[..d].copy_from_slice(&lo[..d]);
        h[..d].copy_from_slice(&hi[..d]);
        AnalyticField { expr, lo: l, hi: h }
    }

    /// Same expression over the bounding box of a field's mesh.
    pub fn over_mesh_of(expr: Expr, field: &FeField) -> Self {
        let (lo, hi) = field.space().mesh().bounding_box();
        AnalyticField::new(expr, &lo, &hi)
    }
}

impl ScalarField for AnalyticField {
    fn dim(&self) -> usize {
        self.expr.dim()
    }

    fn probe(&self, point: &[f64]) -> Option<f64> {
        let d = self.expr.dim();
        for a in 0..d {
            let tol = 1e-12 * (self.hi[a] - self.lo[a]).max(1.0);
            if !(point[a] >= self.lo[a] - tol && point[a] <= self.hi[a] + tol) {
                return None;
            }
        }
        let v = self.expr.eval_unchecked(point);
        v.is_finite().then_some(v)
    }
}
