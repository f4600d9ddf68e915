use crate::error::{Error, Result};
use crate::Vec3;

/// Indexed triangle surface in world millimetres. Faces are counter-clockwise
/// seen from outside, so normals point towards increasing field values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[u32; 3]>,
}

impl TriangleMesh {
    /// Checks index bounds and rejects faces that repeat a vertex.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[u32; 3]>) -> Result<Self> {
        let n = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v as usize >= n) {
                return Err(Error::Validation(format!(
                    "face {fi} {f:?} references a vertex beyond {n}"
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Validation(format!("face {fi} {f:?} repeats a vertex")));
            }
        }
        if let Some(v) = vertices.iter().position(|v| !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite())) {
            return Err(Error::Validation(format!("vertex {v} is not finite")));
        }
        Ok(TriangleMesh { vertices, faces })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    #[inline]
    pub fn triangle(&self, face: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[face];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Unnormalised normal (twice the area vector).
    #[inline]
    pub fn face_cross(&self, face: usize) -> Vec3 {
        let [a, b, c] = self.triangle(face);
        (b - a).cross(&(c - a))
    }

    pub fn face_area(&self, face: usize) -> f64 {
        0.5 * self.face_cross(face).norm()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// Signed enclosed volume; positive for closed meshes with outward normals.
    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let a = self.vertices[f[0] as usize];
                let b = self.vertices[f[1] as usize];
                let c = self.vertices[f[2] as usize];
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }

    pub fn centroid(&self) -> Vec3 {
        if self.vertices.is_empty() {
            return Vec3::zeros();
        }
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    pub fn bounding_box(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), v| {
            (lo.inf(v), hi.sup(v))
        }))
    }

    /// Applies `f` to every vertex, keeping connectivity.
    pub fn map_vertices(&self, f: impl FnMut(&Vec3) -> Vec3) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(f).collect(),
            faces: self.faces.clone(),
        }
    }

    pub fn translated(&self, offset: Vec3) -> TriangleMesh {
        self.map_vertices(|v| v + offset)
    }

    pub fn scaled(&self, s: f64) -> TriangleMesh {
        self.map_vertices(|v| v * s)
    }

    /// Rounds coordinates to the nearest `f32`, matching what mesh files store.
    pub fn round_to_f32(&mut self) {
        for v in &mut self.vertices {
            *v = Vec3::new(v.x as f32 as f64, v.y as f32 as f64, v.z as f32 as f64);
        }
    }

    /// Concatenates meshes; vertex indices of later meshes are shifted.
    pub fn merge(meshes: &[&TriangleMesh]) -> TriangleMesh {
        let mut out = TriangleMesh::default();
        for m in meshes {
            let base = out.vertices.len() as u32;
            out.vertices.extend_from_slice(&m.vertices);
            out.faces
                .extend(m.faces.iter().map(|f| [f[0] + base, f[1] + base, f[2] + base]));
        }
        out
    }

    /// Undirected edges `(lo, hi)`, sorted and unique.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = self
            .faces
            .iter()
            .flat_map(|f| {
                [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]
                    .map(|(a, b)| (a.min(b), a.max(b)))
            })
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Vertex neighbours (1-ring), sorted.
    pub fn vertex_neighbors(&self) -> Vec<Vec<u32>> {
        let mut nbrs = vec![Vec::new(); self.vertices.len()];
        for (a, b) in self.edges() {
            nbrs[a as usize].push(b);
            nbrs[b as usize].push(a);
        }
        for n in &mut nbrs {
            n.sort_unstable();
        }
        nbrs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshing::primitives::*;

    #[test]
    fn rejects_bad_faces() {
        let v = vec![Vec3::zeros(), Vec3::x(), Vec3::y()];
        assert!(TriangleMesh::new(v.clone(), vec![[0, 1, 3]]).is_err());
        assert!(TriangleMesh::new(v.clone(), vec![[0, 1, 1]]).is_err());
        assert!(TriangleMesh::new(v, vec![[0, 1, 2]]).is_ok());
    }

    #[test]
    fn fixtures_are_outward_and_closed() {
        for m in [tetrahedron(), icosahedron()] {
            assert!(m.signed_volume() > 0.0);
            assert_eq!(m.edges().len() * 2, m.faces.len() * 3);
        }
        let t = tetrahedron();
        for (a, b) in t.edges() {
            let d = (t.vertices[a as usize] - t.vertices[b as usize]).norm();
            assert!((d - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn merge_offsets_indices() {
        let t = tetrahedron();
        let m = TriangleMesh::merge(&[&t, &t.translated(Vec3::x() * 5.0)]);
        assert_eq!(m.vertex_count(), 8);
        assert_eq!(m.faces[4], [4, 5, 6]);
    }
}
