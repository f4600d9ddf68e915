use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::TriangleMesh;

/// Topological summary of a triangle mesh.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshDiagnostics {
    pub vertex_count: usize,
    pub face_count: usize,
    pub edge_count: usize,
    pub euler_characteristic: i64,
    /// Sum of per-component genera; `None` unless every component is closed
    /// and has an even Euler characteristic.
    pub genus: Option<u64>,
    pub component_count: usize,
    /// Every edge is shared by exactly two faces.
    pub is_closed: bool,
    /// Every two-face edge is traversed once in each direction.
    pub is_oriented: bool,
    pub boundary_edges: usize,
    pub non_manifold_edges: usize,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

pub fn diagnostics(mesh: &TriangleMesh) -> MeshDiagnostics {
    let nv = mesh.vertices.len();
    // (faces using the edge, forward traversals minus backward ones)
    let mut edges: HashMap<(u32, u32), (u32, i32)> = HashMap::new();
    let mut parent: Vec<u32> = (0..nv as u32).collect();
    for f in &mesh.faces {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let e = edges.entry((a.min(b), a.max(b))).or_insert((0, 0));
            e.0 += 1;
            e.1 += if a < b { 1 } else { -1 };
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb) as usize] = ra.min(rb);
            }
        }
    }
    let boundary_edges = edges.values().filter(|e| e.0 == 1).count();
    let non_manifold_edges = edges.values().filter(|e| e.0 > 2).count();
    let is_closed = boundary_edges == 0 && non_manifold_edges == 0;
    let is_oriented = edges.values().all(|e| e.0 != 2 || e.1 == 0);

    let mut root_of = vec![0u32; nv];
    for v in 0..nv as u32 {
        root_of[v as usize] = find(&mut parent, v);
    }
    let mut comp: HashMap<u32, [i64; 3]> = HashMap::new();
    for &r in &root_of {
        comp.entry(r).or_default()[0] += 1;
    }
    for (a, _) in edges.keys() {
        comp.get_mut(&root_of[*a as usize]).unwrap()[1] += 1;
    }
    for f in &mesh.faces {
        comp.get_mut(&root_of[f[0] as usize]).unwrap()[2] += 1;
    }
    let genus = if is_closed {
        comp.values().try_fold(0u64, |acc, [v, e, f]| {
            let chi = v - e + f;
            (chi <= 2 && chi % 2 == 0).then(|| acc + ((2 - chi) / 2) as u64)
        })
    } else {
        None
    };

    MeshDiagnostics {
        vertex_count: nv,
        face_count: mesh.faces.len(),
        edge_count: edges.len(),
        euler_characteristic: nv as i64 - edges.len() as i64 + mesh.faces.len() as i64,
        genus,
        component_count: comp.len(),
        is_closed,
        is_oriented,
        boundary_edges,
        non_manifold_edges,
    }
}
