use std::sync::Arc;

use super::quadrature::{quadrature_rule, QuadratureRule};
use super::sparse::CsrMatrix;
use super::SolverError;
use crate::element::LagrangeElement;
use crate::space::{FeField, FunctionSpace};

/// Assembled `A x = b`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Basis values and reference gradients at every quadrature point.
struct Tabulated {
    values: Vec<f64>,
    gradients: Vec<f64>,
    n: usize,
}

fn tabulate(elem: &LagrangeElement, rule: &QuadratureRule) -> Tabulated {
    let n = elem.ndofs();
    let d = elem.dim();
    let mut values = vec![0.0; rule.len() * n];
    let mut gradients = vec![0.0; rule.len() * n * d];
    for q in 0..rule.len() {
        elem.eval_basis_into(rule.point(q), &mut values[q * n..(q + 1) * n]);
        elem.eval_gradients_into(rule.point(q), &mut gradients[q * n * d..(q + 1) * n * d]);
    }
    Tabulated {
        values,
        gradients,
        n,
    }
}

/// `A_ij = sum_cells int grad_coef * grad(phi_i).grad(phi_j) + mass_coef * phi_i phi_j`,
/// integrated exactly (rule degree `2k`).
pub fn assemble_bilinear(
    space: &FunctionSpace,
    grad_coef: f64,
    mass_coef: f64,
) -> Result<CsrMatrix, SolverError> {
    let mesh = space.mesh();
    let d = space.dim();
    let rule = quadrature_rule(d, 2 * space.degree())?;
    let tab = tabulate(space.element(), &rule);
    let n = tab.n;
    let mut triplets = Vec::with_capacity(mesh.num_cells() * n * n);
    let mut local = vec![0.0; n * n];
    let mut phys = vec![0.0; n * d];
    for c in 0..mesh.num_cells() {
        let map = mesh.geometry(c);
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..rule.len() {
            let w = rule.weights[q] * map.det;
            let vals = &tab.values[q * n..(q + 1) * n];
            let grads = &tab.gradients[q * n * d..(q + 1) * n * d];
            for i in 0..n {
                let g = map.push_gradient(&grads[i * d..(i + 1) * d]);
                phys[i * d..(i + 1) * d].copy_from_slice(&g[..d]);
            }
            for i in 0..n {
                for j in 0..n {
                    let mut gg = 0.0;
                    for a in 0..d {
                        gg += phys[i * d + a] * phys[j * d + a];
                    }
                    local[i * n + j] += w * (grad_coef * gg + mass_coef * vals[i] * vals[j]);
                }
            }
        }
        let dofs = space.cell_dofs(c);
        for i in 0..n {
            for j in 0..n {
                triplets.push((dofs[i], dofs[j], local[i * n + j]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(
        space.global_dof_count(),
        &triplets,
    ))
}

/// `b_i = int phi_i * source`, where `source` is any field on the same mesh.
pub fn assemble_load(space: &FunctionSpace, source: &FeField) -> Result<Vec<f64>, SolverError> {
    let mesh = space.mesh();
    let src_space = source.space();
    if !Arc::ptr_eq(mesh, src_space.mesh()) {
        return Err(SolverError::MeshMismatch);
    }
    let rule = quadrature_rule(space.dim(), space.degree() + src_space.degree())?;
    let test = tabulate(space.element(), &rule);
    let src = tabulate(src_space.element(), &rule);
    let mut rhs = vec![0.0; space.global_dof_count()];
    for c in 0..mesh.num_cells() {
        let det = mesh.geometry(c).det;
        let dofs = space.cell_dofs(c);
        let src_dofs = src_space.cell_dofs(c);
        for q in 0..rule.len() {
            let sv = &src.values[q * src.n..(q + 1) * src.n];
            let f: f64 = src_dofs
                .iter()
                .zip(sv)
                .map(|(&g, &p)| source.coeffs()[g] * p)
                .sum();
            let w = rule.weights[q] * det * f;
            for (i, &g) in dofs.iter().enumerate() {
                rhs[g] += w * test.values[q * test.n + i];
            }
        }
    }
    Ok(rhs)
}

/// Galerkin system for `-lap(u) + u = f` with `f` already interpolated into
/// `space`. The zero-flux boundary condition is natural: no rows change.
pub fn assemble_helmholtz(space: &FunctionSpace, f: &FeField) -> Result<LinearSystem, SolverError> {
    if f.coeffs().len() != space.global_dof_count() {
        return Err(SolverError::DimensionMismatch {
            expected: space.global_dof_count(),
            got: f.coeffs().len(),
        });
    }
    Ok(LinearSystem {
        matrix: assemble_bilinear(space, 1.0, 1.0)?,
        rhs: assemble_load(space, f)?,
    })
}

/// `|| u_h - exact ||_{L2}` with a rule of degree `2k + 2`.
pub fn l2_error(field: &FeField, exact: impl Fn(&[f64]) -> f64) -> Result<f64, SolverError> {
    let space = field.space();
    let mesh = space.mesh();
    let rule = quadrature_rule(space.dim(), (2 * space.degree() + 2).min(20))?;
    let tab = tabulate(space.element(), &rule);
    let mut sum = 0.0;
    for c in 0..mesh.num_cells() {
        let map = mesh.geometry(c);
        let dofs = space.cell_dofs(c);
        for q in 0..rule.len() {
            let vals = &tab.values[q * tab.n..(q + 1) * tab.n];
            let uh: f64 = dofs
                .iter()
                .zip(vals)
                .map(|(&g, &p)| field.coeffs()[g] * p)
                .sum();
            let x = map.to_physical(rule.point(q));
            let e = uh - exact(&x[..space.dim()]);
            sum += rule.weights[q] * map.det * e * e;
        }
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::mesh::{box_mesh, unit_square_mesh, Mesh};
    use crate::space::function_space;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference_triangle() -> Arc<Mesh> {
        Arc::new(
            Mesh::new(
                2,
                vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
                vec![vec![0, 1, 2]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn p1_reference_mass_and_stiffness() {
        let v = function_space(reference_triangle(), "P", 1).unwrap();
        let mass = assemble_bilinear(&v, 0.0, 1.0).unwrap();
        let stiff = assemble_bilinear(&v, 1.0, 0.0).unwrap();
        let m = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]];
        let k = [[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((mass.get(i, j) - m[i][j] / 24.0).abs() <= 1e-12);
                assert!((stiff.get(i, j) - k[i][j] / 2.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn constant_load_sums_to_area() {
        let m = Arc::new(unit_square_mesh(3, 2, [2.0, 1.5]).unwrap());
        for k in 1..=3 {
            let v = function_space(m.clone(), "P", k).unwrap();
            let f = FeField::interpolate(&v, &parse("2.5", 2).unwrap()).unwrap();
            let sys = assemble_helmholtz(&v, &f).unwrap();
            assert!((sys.rhs.iter().sum::<f64>() - 2.5 * 3.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn symmetric_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let meshes = [
            Arc::new(unit_square_mesh(4, 3, [1.0, 1.0]).unwrap()),
            Arc::new(box_mesh(2, 2, 2, [1.0, 1.0, 1.0]).unwrap()),
        ];
        for m in meshes {
            for k in 1..=3 {
                let v = function_space(m.clone(), "CG", k).unwrap();
                let a = assemble_bilinear(&v, 1.0, 1.0).unwrap();
                assert!(a.asymmetry() <= 1e-12);
                for _ in 0..20 {
                    let x: Vec<f64> = (0..a.size()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    assert!(super::super::dot(&x, &a.mul_vec(&x)) > 0.0);
                }
            }
        }
    }

    #[test]
    fn constants_satisfy_the_discrete_equation() {
        // -lap(c) + c = c
        let m = Arc::new(unit_square_mesh(3, 3, [1.0, 1.0]).unwrap());
        for k in 1..=3 {
            let v = function_space(m.clone(), "P", k).unwrap();
            let c = FeField::interpolate(&v, &parse("1.75", 2).unwrap()).unwrap();
            let sys = assemble_helmholtz(&v, &c).unwrap();
            let ax = sys.matrix.mul_vec(c.coeffs());
            for (a, b) in ax.iter().zip(&sys.rhs) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn load_requires_same_mesh() {
        let a = Arc::new(unit_square_mesh(2, 2, [1.0, 1.0]).unwrap());
        let b = Arc::new(unit_square_mesh(2, 2, [1.0, 1.0]).unwrap());
        let va = function_space(a, "P", 1).unwrap();
        let vb = function_space(b, "P", 1).unwrap();
        let f = FeField::interpolate(&vb, &parse("1", 2).unwrap()).unwrap();
        assert_eq!(assemble_load(&va, &f), Err(SolverError::MeshMismatch));
    }

    #[test]
    fn l2_error_of_exact_field_vanishes() {
        let m = Arc::new(unit_square_mesh(2, 2, [1.0, 1.0]).unwrap());
        let v = function_space(m, "P", 2).unwrap();
        let f = FeField::interpolate(&v, &parse("x[0]*x[1]+x[1]^2", 2).unwrap()).unwrap();
        let e = l2_error(&f, |x| x[0] * x[1] + x[1] * x[1]).unwrap();
        assert!(e < 1e-14);
        // ||1|| over the unit square is 1
        let e = l2_error(&f, |x| x[0] * x[1] + x[1] * x[1] - 1.0).unwrap();
        assert!((e - 1.0).abs() < 1e-13);
    }
}
