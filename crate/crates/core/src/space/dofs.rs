//! Global DOF numbering for continuous Lagrange spaces.
//!
//! A local node is identified globally by the mesh entity it sits on (the
//! sorted global vertices of its barycentric support) together with its
//! barycentric multi-index re-ordered to match those sorted vertices. Two
//! cells sharing an edge or face therefore agree on the node without any
//! orientation bookkeeping.
//!
//! Order: vertices (mesh order), edge nodes (by sorted vertex pair, then
//! from the lower vertex towards the higher), face nodes (by sorted vertex
//! triple), then cell-interior nodes (by cell, then local order).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::element::{LagrangeElement, NodeClass};
use crate::mesh::Mesh;

pub(super) struct Numbering {
    pub dof_map: Vec<usize>,
    pub coords: Vec<[f64; 3]>,
}

type NodeKey = (Vec<usize>, Vec<usize>);

fn node_key(cell: &[usize], alpha: &[usize]) -> NodeKey {
    let mut support: Vec<(usize, usize)> = cell
        .iter()
        .zip(alpha)
        .filter(|(_, &a)| a > 0)
        .map(|(&v, &a)| (v, a))
        .collect();
    support.sort_unstable();
    support.into_iter().unzip()
}

pub(super) fn number_dofs(mesh: &Mesh, elem: &LagrangeElement) -> Numbering {
    let n = elem.ndofs();
    let mut used_vertices = BTreeSet::new();
    let mut shared: BTreeMap<(NodeClass, Vec<usize>), BTreeSet<Vec<usize>>> = BTreeMap::new();
    for c in 0..mesh.num_cells() {
        let cell = mesh.cell(c);
        for i in 0..n {
            let class = elem.node_class(i);
            let (entity, alpha) = node_key(cell, elem.multi_index(i));
            match class {
                NodeClass::Vertex => {
                    used_vertices.insert(entity[0]);
                }
                NodeClass::Edge | NodeClass::Face => {
                    shared.entry((class, entity)).or_default().insert(alpha);
                }
                NodeClass::Interior => {}
            }
        }
    }

    let mut ids: HashMap<NodeKey, usize> = HashMap::new();
    let mut next = 0;
    for &v in &used_vertices {
        ids.insert((vec![v], vec![elem.degree()]), next);
        next += 1;
    }
    // BTreeMap order puts every Edge entity before every Face entity
    for ((_, entity), alphas) in shared {
        // descending multi-index: walk away from the lowest vertex
        for alpha in alphas.into_iter().rev() {
            ids.insert((entity.clone(), alpha), next);
            next += 1;
        }
    }

    let mut dof_map = vec![usize::MAX; mesh.num_cells() * n];
    let mut coords = vec![[f64::NAN; 3]; next];
    for c in 0..mesh.num_cells() {
        let cell = mesh.cell(c);
        let map = mesh.geometry(c);
        for i in 0..n {
            let g = if elem.node_class(i) == NodeClass::Interior {
                coords.push([f64::NAN; 3]);
                next += 1;
                next - 1
            } else {
                ids[&node_key(cell, elem.multi_index(i))]
            };
            dof_map[c * n + i] = g;
            if coords[g][0].is_nan() {
                coords[g] = map.to_physical(elem.node(i));
            }
        }
    }
    Numbering { dof_map, coords }
}
