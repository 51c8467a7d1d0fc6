//! Simplicial meshes on axis-aligned boxes.
//!
//! Triangles in 2D, tetrahedra in 3D. Coordinates are stored padded to three
//! components; only the first `dim` are meaningful.

mod affine;
mod index;

pub use affine::{affine_map, AffineMap};
pub use index::{
    build_spatial_index, default_buckets_per_axis, locate_cell, locate_cell_brute_force,
    SpatialIndex,
};

use std::collections::BTreeMap;

use thiserror::Error;

/// Barycentric containment tolerance used by point location.
pub const CONTAINMENT_TOL: f64 = 1e-12;

/// Cells with `|det J|` at or below this are rejected as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh dimension must be 2 or 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("subdivision counts must be positive, got {0:?}")]
    ZeroCount(Vec<usize>),
    #[error("box lengths must be positive and finite, got {0:?}")]
    BadLength(Vec<f64>),
    #[error("vertex {vertex} has {len} coordinates, expected {dim}")]
    BadVertex {
        vertex: usize,
        len: usize,
        dim: usize,
    },
    #[error("cell {cell}: {reason}")]
    InvalidCell { cell: usize, reason: String },
    #[error("cell {cell} is degenerate (|det J| = {det:e})")]
    DegenerateCell { cell: usize, det: f64 },
    #[error("cell index {cell} out of range (mesh has {count} cells)")]
    CellOutOfRange { cell: usize, count: usize },
    #[error("mesh has no cells")]
    Empty,
}

/// How a lattice mesh was generated. Kept so a field can be saved and the
/// mesh rebuilt on load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub dim: usize,
    pub counts: [usize; 3],
    pub lengths: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<[f64; 3]>,
    cells: Vec<[usize; 4]>,
    boundary_facets: Vec<Vec<usize>>,
    maps: Vec<AffineMap>,
    lattice: Option<LatticeSpec>,
}

impl Mesh {
    /// Builds a mesh from raw vertices and cells. Each cell lists `dim + 1`
    /// vertex indices; negatively oriented cells are flipped.
    pub fn new(
        dim: usize,
        vertices: Vec<Vec<f64>>,
        cells: Vec<Vec<usize>>,
    ) -> Result<Self, MeshError> {
        if dim != 2 && dim != 3 {
            return Err(MeshError::UnsupportedDimension(dim));
        }
        let mut verts = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(MeshError::BadVertex {
                    vertex: i,
                    len: v.len(),
                    dim,
                });
            }
            let mut p = [0.0; 3];
            p[..dim].copy_from_slice(v);
            verts.push(p);
        }
        let mut packed = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() != dim + 1 {
                return Err(MeshError::InvalidCell {
                    cell: c,
                    reason: format!("expected {} vertices, got {}", dim + 1, cell.len()),
                });
            }
            let mut arr = [usize::MAX; 4];
            arr[..=dim].copy_from_slice(cell);
            packed.push(arr);
        }
        Self::from_parts(dim, verts, packed, None)
    }

    fn from_parts(
        dim: usize,
        vertices: Vec<[f64; 3]>,
        mut cells: Vec<[usize; 4]>,
        lattice: Option<LatticeSpec>,
    ) -> Result<Self, MeshError> {
        if cells.is_empty() {
            return Err(MeshError::Empty);
        }
        for (c, cell) in cells.iter_mut().enumerate() {
            let verts = &cell[..=dim];
            if let Some(&bad) = verts.iter().find(|&&v| v >= vertices.len()) {
                return Err(MeshError::InvalidCell {
                    cell: c,
                    reason: format!("vertex index {bad} out of range"),
                });
            }
            for a in 0..=dim {
                for b in a + 1..=dim {
                    if verts[a] == verts[b] {
                        return Err(MeshError::InvalidCell {
                            cell: c,
                            reason: format!("repeated vertex {}", verts[a]),
                        });
                    }
                }
            }
            if signed_det(dim, &vertices, cell) < 0.0 {
                cell.swap(dim - 1, dim);
            }
        }
        let maps = (0..cells.len())
            .map(|c| AffineMap::from_vertices(c, dim, &vertices, &cells[c]))
            .collect::<Result<Vec<_>, _>>()?;
        let mut mesh = Mesh {
            dim,
            vertices,
            cells,
            boundary_facets: Vec::new(),
            maps,
            lattice,
        };
        mesh.boundary_facets = mesh
            .facet_cells()
            .into_iter()
            .filter(|(_, cs)| cs.len() == 1)
            .map(|(f, _)| f)
            .collect();
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Physical coordinates of a vertex (`dim` components).
    pub fn vertex(&self, v: usize) -> &[f64] {
        &self.vertices[v][..self.dim]
    }

    pub(crate) fn vertex_padded(&self, v: usize) -> [f64; 3] {
        self.vertices[v]
    }

    /// Vertex indices of a cell in stored (positively oriented) order.
    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c][..=self.dim]
    }

    /// Precomputed affine geometry of a cell.
    pub fn geometry(&self, c: usize) -> &AffineMap {
        &self.maps[c]
    }

    pub fn boundary_facets(&self) -> &[Vec<usize>] {
        &self.boundary_facets
    }

    pub fn lattice(&self) -> Option<&LatticeSpec> {
        self.lattice.as_ref()
    }

    /// Reference simplex volume: 1/2 in 2D, 1/6 in 3D.
    pub fn reference_volume(&self) -> f64 {
        if self.dim == 2 {
            0.5
        } else {
            1.0 / 6.0
        }
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        self.maps[c].det * self.reference_volume()
    }

    pub fn volume(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_volume(c)).sum()
    }

    /// Axis-aligned bounding box `(min, max)` of all vertices.
    pub fn bounding_box(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for a in 0..self.dim {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        for a in self.dim..3 {
            lo[a] = 0.0;
            hi[a] = 0.0;
        }
        (lo, hi)
    }

    /// Map from each facet (sorted vertex indices) to its incident cells.
    pub fn facet_cells(&self) -> BTreeMap<Vec<usize>, Vec<usize>> {
        let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for c in 0..self.num_cells() {
            let cell = self.cell(c);
            for skip in 0..=self.dim {
                let mut facet: Vec<usize> = cell
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                facet.sort_unstable();
                map.entry(facet).or_default().push(c);
            }
        }
        map
    }
}

fn signed_det(dim: usize, vertices: &[[f64; 3]], cell: &[usize; 4]) -> f64 {
    let p0 = vertices[cell[0]];
    let mut j = [[0.0; 3]; 3];
    for col in 0..dim {
        let p = vertices[cell[col + 1]];
        for row in 0..dim {
            j[row][col] = p[row] - p0[row];
        }
    }
    affine::determinant(dim, &j)
}

fn check_counts(counts: &[usize]) -> Result<(), MeshError> {
    if counts.contains(&0) {
        return Err(MeshError::ZeroCount(counts.to_vec()));
    }
    Ok(())
}

fn check_lengths(lengths: &[f64]) -> Result<(), MeshError> {
    if lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
        return Err(MeshError::BadLength(lengths.to_vec()));
    }
    Ok(())
}

/// Triangulated rectangle `[0, lx] x [0, ly]` with `nx * ny` lattice squares,
/// each split along its lower-left to upper-right diagonal.
pub fn unit_square_mesh(nx: usize, ny: usize, lengths: [f64; 2]) -> Result<Mesh, MeshError> {
    check_counts(&[nx, ny])?;
    check_lengths(&lengths)?;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([
                i as f64 * lengths[0] / nx as f64,
                j as f64 * lengths[1] / ny as f64,
                0.0,
            ]);
        }
    }
    let v = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1));
            cells.push([v00, v10, v11, usize::MAX]);
            cells.push([v00, v11, v01, usize::MAX]);
        }
    }
    let lattice = LatticeSpec {
        dim: 2,
        counts: [nx, ny, 0],
        lengths: [lengths[0], lengths[1], 0.0],
    };
    Mesh::from_parts(2, vertices, cells, Some(lattice))
}

/// Tetrahedralized box `[0, lx] x [0, ly] x [0, lz]`.
///
/// Every hexahedron is cut into the six Kuhn tetrahedra that share one of its
/// main diagonals. Along each axis the diagonal direction is mirrored in the
/// upper half of the box, so the tetrahedralization is symmetric under
/// reflection through the box's mid-planes (and, for equal counts, under
/// 90-degree rotations about the box centre).
pub fn box_mesh(nx: usize, ny: usize, nz: usize, lengths: [f64; 3]) -> Result<Mesh, MeshError> {
    let counts = [nx, ny, nz];
    check_counts(&counts)?;
    check_lengths(&lengths)?;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for l in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([
                    i as f64 * lengths[0] / nx as f64,
                    j as f64 * lengths[1] / ny as f64,
                    l as f64 * lengths[2] / nz as f64,
                ]);
            }
        }
    }
    let v = |i: usize, j: usize, l: usize| (l * (ny + 1) + j) * (nx + 1) + i;
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut cells = Vec::with_capacity(6 * nx * ny * nz);
    for l in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let base = [i, j, l];
                let flip: [bool; 3] = std::array::from_fn(|a| 2 * base[a] + 1 > counts[a]);
                let corner = |bits: [usize; 3]| {
                    let off: [usize; 3] = std::array::from_fn(|a| bits[a] ^ usize::from(flip[a]));
                    v(base[0] + off[0], base[1] + off[1], base[2] + off[2])
                };
                for perm in PERMS {
                    let mut bits = [0usize; 3];
                    let mut tet = [0usize; 4];
                    tet[0] = corner(bits);
                    for (step, &axis) in perm.iter().enumerate() {
                        bits[axis] = 1;
                        tet[step + 1] = corner(bits);
                    }
                    cells.push(tet);
                }
            }
        }
    }
    let lattice = LatticeSpec {
        dim: 3,
        counts,
        lengths,
    };
    Mesh::from_parts(3, vertices, cells, Some(lattice))
}

/// Rebuilds a lattice mesh from its generation parameters.
pub fn lattice_mesh(spec: &LatticeSpec) -> Result<Mesh, MeshError> {
    match spec.dim {
        2 => unit_square_mesh(
            spec.counts[0],
            spec.counts[1],
            [spec.lengths[0], spec.lengths[1]],
        ),
        3 => box_mesh(spec.counts[0], spec.counts[1], spec.counts[2], spec.lengths),
        d => Err(MeshError::UnsupportedDimension(d)),
    }
}
