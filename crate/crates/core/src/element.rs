//! Lagrange `P_k` elements on the reference simplex.
//!
//! Nodes sit on the principal lattice `{ alpha / k : |alpha| <= k }`. Basis
//! functions are written in barycentric coordinates `lambda_0..lambda_dim` as
//!
//! ```text
//! phi_alpha(lambda) = prod_j prod_{m < alpha_j} (k lambda_j - m) / (m + 1)
//! ```
//!
//! which is the nodal basis directly: at node `beta` each factor is a binomial
//! coefficient, nonzero only when `beta = alpha`. No Vandermonde solve is
//! needed.

use thiserror::Error;

pub const MAX_DEGREE: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElementError {
    #[error("element dimension must be 2 or 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("element degree must be in 1..={MAX_DEGREE}, got {0}")]
    UnsupportedDegree(usize),
}

/// Topological entity a node is attached to. In 2D, nodes strictly inside
/// the triangle are `Interior`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    Vertex,
    Edge,
    Face,
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeElement {
    dim: usize,
    degree: usize,
    nodes: Vec<[f64; 3]>,
    /// Barycentric multi-indices; entry 0 pairs with `lambda_0 = 1 - sum(xi)`.
    multi_indices: Vec<[usize; 4]>,
    node_classes: Vec<NodeClass>,
}

/// Basis values and reference gradients at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTabulation {
    pub values: Vec<f64>,
    /// `ndofs x dim`, row-major.
    pub gradients: Vec<f64>,
}

/// `C(k + dim, dim)`.
pub fn num_dofs(dim: usize, k: usize) -> usize {
    (1..=dim).fold(1, |acc, i| acc * (k + i) / i)
}

pub fn lagrange_element(dim: usize, k: usize) -> Result<LagrangeElement, ElementError> {
    LagrangeElement::new(dim, k)
}

impl LagrangeElement {
    pub fn new(dim: usize, k: usize) -> Result<Self, ElementError> {
        if dim != 2 && dim != 3 {
            return Err(ElementError::UnsupportedDimension(dim));
        }
        if k == 0 || k > MAX_DEGREE {
            return Err(ElementError::UnsupportedDegree(k));
        }
        let top = if dim == 3 { k } else { 0 };
        let mut multi_indices = Vec::with_capacity(num_dofs(dim, k));
        for l in 0..=top {
            for j in 0..=k - l {
                for i in 0..=k - l - j {
                    multi_indices.push([k - i - j - l, i, j, l]);
                }
            }
        }
        let nodes = multi_indices
            .iter()
            .map(|a| {
                let mut p = [0.0; 3];
                for d in 0..dim {
                    p[d] = a[d + 1] as f64 / k as f64;
                }
                p
            })
            .collect();
        let node_classes = multi_indices
            .iter()
            .map(|a| match a[..=dim].iter().filter(|&&x| x > 0).count() {
                1 => NodeClass::Vertex,
                2 => NodeClass::Edge,
                3 if dim == 3 => NodeClass::Face,
                _ => NodeClass::Interior,
            })
            .collect();
        Ok(LagrangeElement {
            dim,
            degree: k,
            nodes,
            multi_indices,
            node_classes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ndofs(&self) -> usize {
        self.nodes.len()
    }

    /// Reference coordinates of node `i` (`dim` components).
    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i][..self.dim]
    }

    pub fn node_class(&self, i: usize) -> NodeClass {
        self.node_classes[i]
    }

    /// Barycentric multi-index of node `i` (`dim + 1` entries summing to k).
    pub fn multi_index(&self, i: usize) -> &[usize] {
        &self.multi_indices[i][..=self.dim]
    }

    fn factor_table(&self, xi: &[f64]) -> [[f64; MAX_DEGREE + 1]; 4] {
        let k = self.degree as f64;
        let mut lambda = [0.0; 4];
        lambda[0] = 1.0 - xi[..self.dim].iter().sum::<f64>();
        lambda[1..=self.dim].copy_from_slice(&xi[..self.dim]);
        let mut p = [[0.0; MAX_DEGREE + 1]; 4];
        for j in 0..=self.dim {
            let s = k * lambda[j];
            p[j][0] = 1.0;
            for a in 1..=self.degree {
                p[j][a] = p[j][a - 1] * (s - (a - 1) as f64) / a as f64;
            }
        }
        p
    }

    /// Basis values at `xi`, written into `out` (length `ndofs`).
    #[inline]
    pub fn eval_basis_into(&self, xi: &[f64], out: &mut [f64]) {
        let p = self.factor_table(xi);
        for (o, a) in out.iter_mut().zip(&self.multi_indices) {
            let mut v = 1.0;
            for j in 0..=self.dim {
                v *= p[j][a[j]];
            }
            *o = v;
        }
    }

    pub fn eval_basis(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ndofs()];
        self.eval_basis_into(xi, &mut out);
        out
    }

    /// Reference gradients at `xi`, written row-major into `out`
    /// (`ndofs x dim`).
    pub fn eval_gradients_into(&self, xi: &[f64], out: &mut [f64]) {
        let k = self.degree as f64;
        let p = self.factor_table(xi);
        let mut dp = [[0.0; MAX_DEGREE + 1]; 4];
        for j in 0..=self.dim {
            let s = if j == 0 {
                k * (1.0 - xi[..self.dim].iter().sum::<f64>())
            } else {
                k * xi[j - 1]
            };
            for a in 1..=self.degree {
                let af = a as f64;
                dp[j][a] = (dp[j][a - 1] * (s - (af - 1.0)) + p[j][a - 1] * k) / af;
            }
        }
        let d = self.dim;
        for (row, a) in self.multi_indices.iter().enumerate() {
            // derivative with respect to each barycentric coordinate
            let mut dl = [0.0; 4];
            for j in 0..=d {
                let mut v = dp[j][a[j]];
                for i in 0..=d {
                    if i != j {
                        v *= p[i][a[i]];
                    }
                }
                dl[j] = v;
            }
            for c in 0..d {
                out[row * d + c] = dl[c + 1] - dl[0];
            }
        }
    }

    pub fn eval_basis_gradients(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ndofs() * self.dim];
        self.eval_gradients_into(xi, &mut out);
        out
    }

    pub fn tabulate(&self, xi: &[f64]) -> BasisTabulation {
        BasisTabulation {
            values: self.eval_basis(xi),
            gradients: self.eval_basis_gradients(xi),
        }
    }
}
