use super::{Mesh, CONTAINMENT_TOL};

/// Uniform bucket grid over a mesh's bounding box. Each bucket lists, in
/// ascending order, the cells whose (slightly padded) bounding boxes overlap it.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    dim: usize,
    lo: [f64; 3],
    hi: [f64; 3],
    buckets: [usize; 3],
    width: [f64; 3],
    bins: Vec<Vec<u32>>,
}

/// Default resolution: `2 * ceil(cells^(1/dim))` buckets per axis.
pub fn default_buckets_per_axis(mesh: &Mesh) -> usize {
    let n = mesh.num_cells() as f64;
    2 * (n.powf(1.0 / mesh.dim() as f64).ceil() as usize).max(1)
}

pub fn build_spatial_index(mesh: &Mesh, buckets_per_axis: usize) -> SpatialIndex {
    let dim = mesh.dim();
    let per_axis = buckets_per_axis.max(1);
    let (mut lo, mut hi) = mesh.bounding_box();
    let mut buckets = [1usize; 3];
    let mut width = [1.0; 3];
    for a in 0..dim {
        let pad = 1e-9 * (hi[a] - lo[a]).max(1.0);
        lo[a] -= pad;
        hi[a] += pad;
        buckets[a] = per_axis;
        width[a] = (hi[a] - lo[a]) / per_axis as f64;
    }
    let mut bins = vec![Vec::new(); buckets.iter().product()];
    for c in 0..mesh.num_cells() {
        let mut clo = [f64::INFINITY; 3];
        let mut chi = [f64::NEG_INFINITY; 3];
        for &v in mesh.cell(c) {
            let p = mesh.vertex(v);
            for a in 0..dim {
                clo[a] = clo[a].min(p[a]);
                chi[a] = chi[a].max(p[a]);
            }
        }
        let mut range = [(0usize, 0usize); 3];
        for a in 0..dim {
            let pad = 1e-9 * (chi[a] - clo[a]);
            range[a] = (
                bucket_of(clo[a] - pad, lo[a], width[a], buckets[a]),
                bucket_of(chi[a] + pad, lo[a], width[a], buckets[a]),
            );
        }
        for k in range[2].0..=range[2].1 {
            for j in range[1].0..=range[1].1 {
                for i in range[0].0..=range[0].1 {
                    bins[(k * buckets[1] + j) * buckets[0] + i].push(c as u32);
                }
            }
        }
    }
    SpatialIndex {
        dim,
        lo,
        hi,
        buckets,
        width,
        bins,
    }
}

#[inline]
fn bucket_of(x: f64, lo: f64, width: f64, n: usize) -> usize {
    let b = ((x - lo) / width).floor();
    if b <= 0.0 {
        0
    } else {
        (b as usize).min(n - 1)
    }
}

impl SpatialIndex {
    /// Candidate cells for a point; empty when the point lies outside the
    /// padded bounding box.
    #[inline]
    pub fn candidates(&self, point: &[f64]) -> &[u32] {
        let mut flat = 0;
        for a in (0..self.dim).rev() {
            let x = point[a];
            if !(x >= self.lo[a] && x <= self.hi[a]) {
                return &[];
            }
            flat =
                flat * self.buckets[a] + bucket_of(x, self.lo[a], self.width[a], self.buckets[a]);
        }
        &self.bins[flat]
    }

    pub fn buckets_per_axis(&self) -> usize {
        self.buckets[0]
    }

    pub fn num_buckets(&self) -> usize {
        self.bins.len()
    }
}

/// Lowest-index cell containing `point` (barycentric coordinates all
/// `>= -1e-12`), or `None` outside the mesh.
#[inline]
pub fn locate_cell(mesh: &Mesh, index: &SpatialIndex, point: &[f64]) -> Option<usize> {
    index
        .candidates(point)
        .iter()
        .map(|&c| c as usize)
        .find(|&c| mesh.geometry(c).contains(point, CONTAINMENT_TOL))
}

/// Linear scan over every cell; the reference for [`locate_cell`].
pub fn locate_cell_brute_force(mesh: &Mesh, point: &[f64]) -> Option<usize> {
    (0..mesh.num_cells()).find(|&c| mesh.geometry(c).contains(point, CONTAINMENT_TOL))
}
