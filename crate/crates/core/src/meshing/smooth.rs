use rayon::prelude::*;

use super::TriangleMesh;
use crate::error::{Error, Result};
use crate::Vec3;

/// Umbrella-operator smoothing: each pass moves every vertex by `step` times
/// the offset to the mean of its 1-ring, using the previous pass's positions.
/// Vertices without neighbours stay put.
pub fn laplacian_smooth(mesh: &TriangleMesh, iterations: usize, step: f64) -> Result<TriangleMesh> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Argument(format!("smoothing step {step} outside (0, 1]")));
    }
    if iterations == 0 {
        return Ok(mesh.clone());
    }
    let nbrs = mesh.vertex_neighbors();
    let mut cur = mesh.vertices.clone();
    let mut next = cur.clone();
    for _ in 0..iterations {
        next.par_iter_mut().enumerate().for_each(|(i, out)| {
            let ring = &nbrs[i];
            let v = cur[i];
            *out = if ring.is_empty() {
                v
            } else {
                let mean = ring.iter().map(|&j| cur[j as usize]).sum::<Vec3>() / ring.len() as f64;
                v + (mean - v) * step
            };
        });
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(TriangleMesh {
        vertices: cur,
        faces: mesh.faces.clone(),
    })
}
