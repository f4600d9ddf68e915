use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bvh::Bvh;
use super::triangle::{intersect_with_normals, unit_normal};
use super::IntersectionReport;
use crate::meshing::TriangleMesh;
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfIntersection {
    /// Percentage of faces in at least one intersecting pair.
    pub percent: f64,
    /// Sorted ids of the intersecting faces.
    pub faces: Vec<u32>,
    /// Intersecting face pairs.
    pub pairs: usize,
    /// Zero-area faces, which are never tested.
    pub degenerate_faces: usize,
}

fn normals(mesh: &TriangleMesh) -> Vec<Option<Vec3>> {
    (0..mesh.faces.len())
        .into_par_iter()
        .map(|f| unit_normal(&mesh.triangle(f)))
        .collect()
}

/// Whether faces `i` of `a` and `j` of `b` intersect, given cached normals.
#[inline]
fn hit(a: &TriangleMesh, na: &[Option<Vec3>], i: u32, b: &TriangleMesh, nb: &[Option<Vec3>], j: u32) -> bool {
    match (na[i as usize], nb[j as usize]) {
        (Some(n1), Some(n2)) => {
            intersect_with_normals(&a.triangle(i as usize), &n1, &b.triangle(j as usize), &n2).is_some()
        }
        _ => false,
    }
}

fn shares_vertex(f: &[u32; 3], g: &[u32; 3]) -> bool {
    f.iter().any(|v| g.contains(v))
}

/// Self-intersections of a mesh. Face pairs sharing a vertex are skipped.
pub fn self_intersection_fraction(mesh: &TriangleMesh) -> SelfIntersection {
    let n = normals(mesh);
    let candidates = Bvh::build(mesh).self_candidates();
    let hits: Vec<(u32, u32)> = candidates
        .into_par_iter()
        .filter(|&(i, j)| {
            !shares_vertex(&mesh.faces[i as usize], &mesh.faces[j as usize]) && hit(mesh, &n, i, mesh, &n, j)
        })
        .collect();
    summarize_self(mesh, &n, &hits)
}

fn summarize_self(mesh: &TriangleMesh, n: &[Option<Vec3>], hits: &[(u32, u32)]) -> SelfIntersection {
    let mut faces: Vec<u32> = hits.iter().flat_map(|&(i, j)| [i, j]).collect();
    faces.sort_unstable();
    faces.dedup();
    SelfIntersection {
        percent: if mesh.faces.is_empty() {
            0.0
        } else {
            100.0 * faces.len() as f64 / mesh.faces.len() as f64
        },
        faces,
        pairs: hits.len(),
        degenerate_faces: n.iter().filter(|x| x.is_none()).count(),
    }
}

/// Intersections between two distinct meshes.
pub fn mesh_pair_intersections(a: &TriangleMesh, b: &TriangleMesh) -> IntersectionReport {
    let (na, nb) = (normals(a), normals(b));
    let candidates = Bvh::build(a).candidates_with(&Bvh::build(b));
    let hits: Vec<(u32, u32)> = candidates
        .into_par_iter()
        .filter(|&(i, j)| hit(a, &na, i, b, &nb, j))
        .collect();
    IntersectionReport::from_hits(["a".into(), "b".into()], a.faces.len(), b.faces.len(), &hits)
}

/// All-pairs reference implementations, quadratic in the face count.
pub mod brute_force {
    use super::*;

    pub fn self_intersection_fraction(mesh: &TriangleMesh) -> SelfIntersection {
        let n = normals(mesh);
        let mut hits = Vec::new();
        for i in 0..mesh.faces.len() as u32 {
            for j in i + 1..mesh.faces.len() as u32 {
                if !shares_vertex(&mesh.faces[i as usize], &mesh.faces[j as usize]) && hit(mesh, &n, i, mesh, &n, j) {
                    hits.push((i, j));
                }
            }
        }
        summarize_self(mesh, &n, &hits)
    }

    pub fn mesh_pair_intersections(a: &TriangleMesh, b: &TriangleMesh) -> IntersectionReport {
        let (na, nb) = (normals(a), normals(b));
        let mut hits = Vec::new();
        for i in 0..a.faces.len() as u32 {
            for j in 0..b.faces.len() as u32 {
                if hit(a, &na, i, b, &nb, j) {
                    hits.push((i, j));
                }
            }
        }
        IntersectionReport::from_hits(["a".into(), "b".into()], a.faces.len(), b.faces.len(), &hits)
    }
}
