//! Reference shapes for tests, phantoms and examples.

use std::collections::HashMap;

use super::TriangleMesh;
use crate::Vec3;

/// Regular tetrahedron with unit edges centred on the origin.
pub fn tetrahedron() -> TriangleMesh {
    let a = Vec3::new(1.0, 1.0, 1.0);
    let b = Vec3::new(1.0, -1.0, -1.0);
    let c = Vec3::new(-1.0, 1.0, -1.0);
    let d = Vec3::new(-1.0, -1.0, 1.0);
    // edge length of this tetrahedron is 2*sqrt(2)
    let k = 1.0 / (2.0 * 2f64.sqrt());
    TriangleMesh::new(
        vec![a * k, b * k, c * k, d * k],
        vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    )
    .unwrap()
}

/// Icosahedron inscribed in the unit sphere.
pub fn icosahedron() -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ];
    let vertices = raw
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    TriangleMesh::new(vertices, faces).unwrap()
}

/// Icosahedron subdivided `levels` times, projected onto the unit sphere.
pub fn icosphere(levels: usize) -> TriangleMesh {
    let mut m = icosahedron();
    for _ in 0..levels {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut faces = Vec::with_capacity(m.faces.len() * 4);
        for f in m.faces.clone() {
            let mut get = |a: u32, b: u32| {
                *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    let p = (m.vertices[a as usize] + m.vertices[b as usize]).normalize();
                    m.vertices.push(p);
                    (m.vertices.len() - 1) as u32
                })
            };
            let (ab, bc, ca) = (get(f[0], f[1]), get(f[1], f[2]), get(f[2], f[0]));
            faces.extend([[f[0], ab, ca], [ab, f[1], bc], [ca, bc, f[2]], [ab, bc, ca]]);
        }
        m.faces = faces;
    }
    m
}

/// Torus with tube radius 1 around a circle of radius 3 in the xy-plane,
/// triangulated from an `n × m` parameter grid.
pub fn grid_torus(n: usize, m: usize) -> TriangleMesh {
    let mut vertices = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let u = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let v = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let r = 3.0 + v.cos();
            vertices.push(Vec3::new(r * u.cos(), r * u.sin(), v.sin()));
        }
    }
    let id = |i: usize, j: usize| ((i % n) * m + (j % m)) as u32;
    let mut faces = Vec::new();
    for i in 0..n {
        for j in 0..m {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriangleMesh::new(vertices, faces).unwrap()
}

/// Icosphere with the given centre and radius.
pub fn sphere(center: Vec3, radius: f64, levels: usize) -> TriangleMesh {
    icosphere(levels).map_vertices(|v| center + v * radius)
}
