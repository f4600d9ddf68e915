use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::meshing::TriangleMesh;

/// Mean squared length over the undirected edges of the mesh.
pub fn edge_loss(mesh: &TriangleMesh) -> Result<f64> {
    let edges = mesh.edges();
    if edges.is_empty() {
        return Err(Error::Argument("mesh has no edges".into()));
    }
    let sum: f64 = edges
        .iter()
        .map(|&(a, b)| (mesh.vertices[a as usize] - mesh.vertices[b as usize]).norm_squared())
        .sum();
    Ok(sum / edges.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalConsistency {
    /// Mean of `1 - cos` between the unit normals of faces sharing an edge.
    pub loss: f64,
    pub face_pairs: usize,
    /// Edges not shared by exactly two faces, or touching a zero-area face.
    pub skipped_edges: usize,
}

pub fn normal_consistency_loss(mesh: &TriangleMesh) -> NormalConsistency {
    let mut by_edge: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    for (fi, f) in mesh.faces.iter().enumerate() {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            by_edge.entry((a.min(b), a.max(b))).or_default().push(fi);
        }
    }
    let normals: Vec<Option<_>> = (0..mesh.faces.len())
        .map(|f| mesh.face_cross(f).try_normalize(0.0))
        .collect();
    let mut keys: Vec<_> = by_edge.keys().copied().collect();
    keys.sort_unstable();
    let (mut sum, mut pairs, mut skipped) = (0.0, 0usize, 0usize);
    for k in keys {
        match by_edge[&k].as_slice() {
            &[f0, f1] => match (normals[f0], normals[f1]) {
                (Some(n0), Some(n1)) => {
                    sum += 1.0 - n0.dot(&n1);
                    pairs += 1;
                }
                _ => skipped += 1,
            },
            _ => skipped += 1,
        }
    }
    NormalConsistency {
        loss: if pairs == 0 { 0.0 } else { sum / pairs as f64 },
        face_pairs: pairs,
        skipped_edges: skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshing::primitives::{icosphere, tetrahedron};
    use crate::Vec3;
    use std::collections::BTreeSet;

    #[test]
    fn unit_tetrahedron_edges() {
        assert!((edge_loss(&tetrahedron()).unwrap() - 1.0).abs() < 1e-12);
        assert!(edge_loss(&TriangleMesh::default()).is_err());
    }

    #[test]
    fn edge_loss_matches_independent_pass() {
        let m = icosphere(2).scaled(3.0);
        let mut set = BTreeSet::new();
        for f in &m.faces {
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                set.insert(if a < b { (a, b) } else { (b, a) });
            }
        }
        let direct: f64 = set
            .iter()
            .map(|&(a, b)| (m.vertices[a as usize] - m.vertices[b as usize]).norm_squared())
            .sum::<f64>()
            / set.len() as f64;
        assert!((edge_loss(&m).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn flat_and_folded() {
        let flat = TriangleMesh::new(
            vec![Vec3::zeros(), Vec3::x(), Vec3::new(1.0, 1.0, 0.0), Vec3::y()],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let nc = normal_consistency_loss(&flat);
        assert_eq!((nc.loss, nc.face_pairs, nc.skipped_edges), (0.0, 1, 4));

        let folded = TriangleMesh::new(
            vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()],
            vec![[0, 1, 2], [0, 3, 1]],
        )
        .unwrap();
        assert!((normal_consistency_loss(&folded).loss - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_and_scale_invariance() {
        let m = icosphere(2).map_vertices(|v| Vec3::new(v.x * 2.0, v.y, v.z * 0.7));
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0);
        let a = normal_consistency_loss(&m).loss;
        assert!((normal_consistency_loss(&m.map_vertices(|v| rot * v)).loss - a).abs() < 1e-12);
        assert!((normal_consistency_loss(&m.scaled(10.0)).loss - a).abs() < 1e-12);
    }
}
