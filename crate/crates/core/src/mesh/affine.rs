use super::{Mesh, MeshError, DEGENERATE_TOL};

/// Per-cell affine geometry `x(xi) = origin + J xi` from the reference simplex
/// (vertices `0, e_1, ..., e_dim`) onto a physical cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub cell_index: usize,
    pub dim: usize,
    pub origin: [f64; 3],
    pub jacobian: [[f64; 3]; 3],
    pub jacobian_inv: [[f64; 3]; 3],
    /// `|det J|`, strictly positive.
    pub det: f64,
}

impl AffineMap {
    pub(crate) fn from_vertices(
        cell_index: usize,
        dim: usize,
        vertices: &[[f64; 3]],
        cell: &[usize; 4],
    ) -> Result<Self, MeshError> {
        let origin = vertices[cell[0]];
        let mut jacobian = [[0.0; 3]; 3];
        for col in 0..dim {
            let p = vertices[cell[col + 1]];
            for row in 0..dim {
                jacobian[row][col] = p[row] - origin[row];
            }
        }
        let det = determinant(dim, &jacobian);
        if !(det.abs() > DEGENERATE_TOL) {
            return Err(MeshError::DegenerateCell {
                cell: cell_index,
                det: det.abs(),
            });
        }
        Ok(AffineMap {
            cell_index,
            dim,
            origin,
            jacobian,
            jacobian_inv: inverse(dim, &jacobian, det),
            det: det.abs(),
        })
    }

    /// Reference coordinates to physical coordinates.
    pub fn to_physical(&self, xi: &[f64]) -> [f64; 3] {
        let mut x = self.origin;
        for row in 0..self.dim {
            for col in 0..self.dim {
                x[row] += self.jacobian[row][col] * xi[col];
            }
        }
        x
    }

    /// Physical coordinates to reference coordinates.
    #[inline]
    pub fn to_reference(&self, x: &[f64]) -> [f64; 3] {
        let mut d = [0.0; 3];
        for a in 0..self.dim {
            d[a] = x[a] - self.origin[a];
        }
        let mut xi = [0.0; 3];
        for row in 0..self.dim {
            for col in 0..self.dim {
                xi[row] += self.jacobian_inv[row][col] * d[col];
            }
        }
        xi
    }

    /// Barycentric coordinates of a physical point; entry 0 belongs to the
    /// cell's first vertex.
    #[inline]
    pub fn barycentric(&self, x: &[f64]) -> [f64; 4] {
        let xi = self.to_reference(x);
        let mut lambda = [0.0; 4];
        lambda[0] = 1.0 - xi[..self.dim].iter().sum::<f64>();
        lambda[1..=self.dim].copy_from_slice(&xi[..self.dim]);
        lambda
    }

    /// True when every barycentric coordinate is at least `-tol`.
    #[inline]
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.barycentric(x)[..=self.dim].iter().all(|&l| l >= -tol)
    }

    /// Maps a reference-coordinate gradient to a physical gradient: `J^{-T} g`.
    #[inline]
    pub fn push_gradient(&self, g: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for a in 0..self.dim {
            for b in 0..self.dim {
                out[a] += self.jacobian_inv[b][a] * g[b];
            }
        }
        out
    }
}

/// Affine geometry of one mesh cell.
pub fn affine_map(mesh: &Mesh, cell: usize) -> Result<AffineMap, MeshError> {
    if cell >= mesh.num_cells() {
        return Err(MeshError::CellOutOfRange {
            cell,
            count: mesh.num_cells(),
        });
    }
    let mut packed = [usize::MAX; 4];
    packed[..=mesh.dim()].copy_from_slice(mesh.cell(cell));
    let verts: Vec<[f64; 3]> = (0..mesh.num_vertices())
        .map(|v| mesh.vertex_padded(v))
        .collect();
    AffineMap::from_vertices(cell, mesh.dim(), &verts, &packed)
}

pub(crate) fn determinant(dim: usize, m: &[[f64; 3]; 3]) -> f64 {
    match dim {
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

fn inverse(dim: usize, m: &[[f64; 3]; 3], det: f64) -> [[f64; 3]; 3] {
    let mut inv = [[0.0; 3]; 3];
    if dim == 2 {
        inv[0][0] = m[1][1] / det;
        inv[0][1] = -m[0][1] / det;
        inv[1][0] = -m[1][0] / det;
        inv[1][1] = m[0][0] / det;
        return inv;
    }
    for r in 0..3 {
        for c in 0..3 {
            // cofactor of (c, r)
            let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
            let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
            inv[r][c] = (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) / det;
        }
    }
    inv
}
