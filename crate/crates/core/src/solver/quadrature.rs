//! Simplex quadrature from collapsed (Duffy) tensor-product Gauss rules.
//!
//! The unit square/cube is mapped onto the reference simplex with
//! `xi_0 = u (1 - v)(1 - w)`, `xi_1 = v (1 - w)`, `xi_2 = w`; the Jacobian of
//! the collapse is folded into the weights, which stay positive.

use super::SolverError;

pub const MAX_QUADRATURE_DEGREE: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    /// Highest total polynomial degree integrated exactly.
    pub degree: usize,
    /// Reference-simplex points, `dim` used components each.
    pub points: Vec<[f64; 3]>,
    /// Positive weights summing to the reference simplex volume.
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, q: usize) -> &[f64] {
        &self.points[q][..self.dim]
    }

    /// Integrates `f` over the reference simplex.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        (0..self.len())
            .map(|q| self.weights[q] * f(self.point(q)))
            .sum()
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`, `n >= 1`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Rule on the reference simplex exact for total degree `degree`.
pub fn quadrature_rule(dim: usize, degree: usize) -> Result<QuadratureRule, SolverError> {
    if dim != 2 && dim != 3 {
        return Err(SolverError::UnsupportedDimension(dim));
    }
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(SolverError::UnsupportedQuadrature(degree));
    }
    // collapse adds up to dim - 1 powers along the outer axes
    let n = (degree + dim) / 2 + 1;
    let (x, w) = gauss_legendre_unit(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    if dim == 2 {
        for (&v, &wv) in x.iter().zip(&w) {
            for (&u, &wu) in x.iter().zip(&w) {
                points.push([u * (1.0 - v), v, 0.0]);
                weights.push(wu * wv * (1.0 - v));
            }
        }
    } else {
        for (&s, &ws) in x.iter().zip(&w) {
            for (&v, &wv) in x.iter().zip(&w) {
                for (&u, &wu) in x.iter().zip(&w) {
                    points.push([u * (1.0 - v) * (1.0 - s), v * (1.0 - s), s]);
                    weights.push(wu * wv * ws * (1.0 - v) * (1.0 - s) * (1.0 - s));
                }
            }
        }
    }
    Ok(QuadratureRule {
        dim,
        degree,
        points,
        weights,
    })
}
