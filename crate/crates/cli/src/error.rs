use fevis::expr::ExprError;
use fevis::render::RenderError;
use fevis::space::{ContainerError, SpaceError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Clap(_) | CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

fn expr_kind(e: &ExprError) -> fn(String) -> CliError {
    match e {
        ExprError::NonFinite { .. } => CliError::Runtime,
        _ => CliError::Validation,
    }
}

fn space_kind(e: &SpaceError) -> fn(String) -> CliError {
    match e {
        SpaceError::UnsupportedFamily(_)
        | SpaceError::Element(_)
        | SpaceError::DimensionMismatch { .. }
        | SpaceError::CoefficientCount { .. } => CliError::Validation,
        SpaceError::Interpolation { source, .. } => expr_kind(source),
        _ => CliError::Runtime,
    }
}

impl From<fevis::Error> for CliError {
    fn from(e: fevis::Error) -> Self {
        let msg = e.to_string();
        let kind: fn(String) -> CliError = match &e {
            fevis::Error::Mesh(_) | fevis::Error::Element(_) => CliError::Validation,
            fevis::Error::Expr(x) => expr_kind(x),
            fevis::Error::Space(s) => space_kind(s),
            fevis::Error::Solver(_) => CliError::Runtime,
            fevis::Error::Render(r) => match r {
                RenderError::Io { .. } | RenderError::Format { .. } => CliError::Io,
                RenderError::NonFinite(_) => CliError::Runtime,
                _ => CliError::Validation,
            },
            fevis::Error::Container(c) => match c {
                ContainerError::NotLattice => CliError::Validation,
                ContainerError::Space(s) => space_kind(s),
                _ => CliError::Io,
            },
        };
        kind(msg)
    }
}

macro_rules! via_crate_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                fevis::Error::from(e).into()
            }
        }
    )*};
}

via_crate_error!(
    fevis::mesh::MeshError,
    ExprError,
    SpaceError,
    fevis::solver::SolverError,
    RenderError,
    ContainerError
);
