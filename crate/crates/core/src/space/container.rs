//! Binary field container.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! offset  size  content
//!      0     8  magic "FEVFIELD"
//!      8     4  u32 format version (1)
//!     12     4  u32 dim (2 or 3)
//!     16     4  u32 degree k
//!     20    12  u32 x 3 lattice counts (unused axes 0)
//!     32    24  f64 x 3 lattice lengths (unused axes 0)
//!     56     8  u64 coefficient count n
//!     64  8 n  f64 x n coefficients
//! ```
//!
//! Only lattice meshes can be stored; the mesh is rebuilt from its counts
//! and lengths on load.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::{Family, FeField, FunctionSpace, SpaceError};
use crate::mesh::{lattice_mesh, LatticeSpec, MeshError};

pub const FIELD_MAGIC: &[u8; 8] = b"FEVFIELD";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Stream(#[from] io::Error),
    #[error("not a field container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    Version(u32),
    #[error("field mesh was not generated from a lattice and cannot be saved")]
    NotLattice,
    #[error("container holds {got} coefficients, space needs {expected}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("invalid mesh parameters: {0}")]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

pub fn write_field<W: Write>(field: &FeField, mut w: W) -> Result<(), ContainerError> {
    let space = field.space();
    let spec = space.mesh().lattice().ok_or(ContainerError::NotLattice)?;
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(spec.dim as u32).to_le_bytes())?;
    w.write_all(&(space.degree() as u32).to_le_bytes())?;
    for &n in &spec.counts {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    for &l in &spec.lengths {
        w.write_all(&l.to_le_bytes())?;
    }
    w.write_all(&(field.coeffs().len() as u64).to_le_bytes())?;
    for &c in field.coeffs() {
        w.write_all(&c.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_field<R: Read>(mut r: R) -> Result<FeField, ContainerError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(ContainerError::Version(version));
    }
    let dim = read_u32(&mut r)? as usize;
    let degree = read_u32(&mut r)? as usize;
    let mut counts = [0usize; 3];
    for c in counts.iter_mut() {
        *c = read_u32(&mut r)? as usize;
    }
    let mut lengths = [0.0; 3];
    for l in lengths.iter_mut() {
        *l = read_f64(&mut r)?;
    }
    let mut nb = [0u8; 8];
    r.read_exact(&mut nb)?;
    let n = u64::from_le_bytes(nb) as usize;

    let mesh = lattice_mesh(&LatticeSpec {
        dim,
        counts,
        lengths,
    })?;
    let space = Arc::new(FunctionSpace::new(Arc::new(mesh), Family::P, degree)?);
    if n != space.global_dof_count() {
        return Err(ContainerError::CoefficientCount {
            expected: space.global_dof_count(),
            got: n,
        });
    }
    let mut coeffs = Vec::with_capacity(n);
    for _ in 0..n {
        coeffs.push(read_f64(&mut r)?);
    }
    Ok(FeField::new(space, coeffs)?)
}

pub fn save_field(field: &FeField, path: &Path) -> Result<(), ContainerError> {
    let file = File::create(path).map_err(|source| ContainerError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_field(field, BufWriter::new(file)).map_err(|e| with_path(e, path))
}

pub fn load_field(path: &Path) -> Result<FeField, ContainerError> {
    let file = File::open(path).map_err(|source| ContainerError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_field(BufReader::new(file)).map_err(|e| with_path(e, path))
}

fn with_path(e: ContainerError, path: &Path) -> ContainerError {
    match e {
        ContainerError::Stream(source) => ContainerError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    }
}
