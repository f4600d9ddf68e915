use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TriangleMesh;
use crate::error::{Error, Result};
use crate::metrics::PointCloud;

/// Draws `n` points uniformly by area: a face is picked with probability
/// proportional to its area, then a uniform point on it. Deterministic in
/// `seed`.
pub fn sample_surface_points(mesh: &TriangleMesh, n: usize, seed: u64) -> Result<PointCloud> {
    let mut cumulative = Vec::with_capacity(mesh.faces.len());
    let mut total = 0.0;
    for f in 0..mesh.faces.len() {
        total += mesh.face_area(f);
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(Error::Degenerate("mesh has zero surface area".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = mesh.faces.len() - 1;
    let points = (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let f = cumulative.partition_point(|&c| c <= u).min(last);
            let (mut r1, mut r2) = (rng.gen::<f64>(), rng.gen::<f64>());
            if r1 + r2 > 1.0 {
                r1 = 1.0 - r1;
                r2 = 1.0 - r2;
            }
            let [a, b, c] = mesh.triangle(f);
            a + (b - a) * r1 + (c - a) * r2
        })
        .collect();
    Ok(PointCloud::new(points))
}
