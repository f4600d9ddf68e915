//! Exact Euclidean distance transform (lower envelope of parabolas, one axis
//! at a time) and the signed distance field built on it.

use super::grid::{ScalarField, VoxelGrid};
use super::labels::BinaryMask;
use crate::error::{Error, Result};

/// Squared distance transform of one sampled line with site spacing `h`.
/// `f` holds squared distances (or infinity); `out` receives the result.
fn edt_line(f: &[f64], h: f64, out: &mut [f64], hull: &mut Vec<usize>, breaks: &mut Vec<f64>) {
    hull.clear();
    breaks.clear();
    let pos = |i: usize| i as f64 * h;
    for (q, &fq) in f.iter().enumerate() {
        if !fq.is_finite() {
            continue;
        }
        loop {
            match hull.last() {
                None => {
                    hull.push(q);
                    breaks.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&v) => {
                    let (pq, pv) = (pos(q), pos(v));
                    let s = ((fq + pq * pq) - (f[v] + pv * pv)) / (2.0 * (pq - pv));
                    if s <= *breaks.last().unwrap() {
                        hull.pop();
                        breaks.pop();
                    } else {
                        hull.push(q);
                        breaks.push(s);
                        break;
                    }
                }
            }
        }
    }
    if hull.is_empty() {
        out.fill(f64::INFINITY);
        return;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let x = pos(q);
        while k + 1 < hull.len() && breaks[k + 1] < x {
            k += 1;
        }
        let v = hull[k];
        let d = x - pos(v);
        *o = d * d + f[v];
    }
}

/// Squared Euclidean distance (mm²) from every voxel centre to the nearest
/// voxel where `target` is true. Infinity everywhere when no target exists.
pub fn squared_distance_to(target: &VoxelGrid<bool>) -> ScalarField {
    let g = *target.geometry();
    let [nx, ny, nz] = g.dims;
    let mut field: Vec<f64> = target
        .data()
        .iter()
        .map(|&t| if t { 0.0 } else { f64::INFINITY })
        .collect();

    let longest = nx.max(ny).max(nz);
    let mut line = vec![0.0; longest];
    let mut out = vec![0.0; longest];
    let mut hull = Vec::with_capacity(longest);
    let mut breaks = Vec::with_capacity(longest);

    for (axis, n) in [(0usize, nx), (1, ny), (2, nz)] {
        let stride = match axis {
            0 => 1,
            1 => nx,
            _ => nx * ny,
        };
        let h = g.spacing[axis];
        // Enumerate the start index of every line along `axis`.
        let (na, nb) = match axis {
            0 => (ny, nz),
            1 => (nx, nz),
            _ => (nx, ny),
        };
        for b in 0..nb {
            for a in 0..na {
                let start = match axis {
                    0 => g.index(0, a, b),
                    1 => g.index(a, 0, b),
                    _ => g.index(a, b, 0),
                };
                for t in 0..n {
                    line[t] = field[start + t * stride];
                }
                edt_line(&line[..n], h, &mut out[..n], &mut hull, &mut breaks);
                for t in 0..n {
                    field[start + t * stride] = out[t];
                }
            }
        }
    }
    VoxelGrid::from_vec(g, field).expect("same geometry")
}

/// Signed Euclidean distance in mm: negative inside the mask (distance to the
/// nearest outside voxel), positive outside (distance to the nearest inside voxel).
pub fn signed_distance(mask: &BinaryMask) -> Result<ScalarField> {
    let grid = mask.grid();
    let inside = grid.data().iter().filter(|&&b| b).count();
    if inside == 0 {
        return Err(Error::Degenerate("mask has no foreground voxels".into()));
    }
    if inside == grid.len() {
        return Err(Error::Degenerate("mask has no background voxels".into()));
    }
    let to_inside = squared_distance_to(grid);
    let to_outside = squared_distance_to(&grid.map(|&b| !b));
    let data = grid
        .data()
        .iter()
        .zip(to_inside.data().iter().zip(to_outside.data()))
        .map(|(&b, (&din, &dout))| if b { -dout.sqrt() } else { din.sqrt() })
        .collect();
    VoxelGrid::from_vec(*grid.geometry(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::GridGeometry;
    use proptest::prelude::*;

    fn brute_sdf(mask: &VoxelGrid<bool>) -> Vec<f64> {
        let g = *mask.geometry();
        (0..g.len())
            .map(|i| {
                let p = g.world_of_index(i);
                let me = mask.data()[i];
                let best = (0..g.len())
                    .filter(|&j| mask.data()[j] != me)
                    .map(|j| (g.world_of_index(j) - p).norm())
                    .fold(f64::INFINITY, f64::min);
                if me {
                    -best
                } else {
                    best
                }
            })
            .collect()
    }

    fn ball(dims: usize, r: f64) -> BinaryMask {
        let c = (dims / 2) as f64;
        BinaryMask::from_grid(VoxelGrid::from_fn(GridGeometry::unit([dims; 3]), |i, j, k| {
            let d = ((i as f64 - c).powi(2) + (j as f64 - c).powi(2) + (k as f64 - c).powi(2)).sqrt();
            d <= r
        }))
    }

    #[test]
    fn ball_center_and_outside_values() {
        let m = ball(32, 10.0);
        let sdf = signed_distance(&m).unwrap();
        let center = *sdf.get(16, 16, 16);
        assert!((center + 10.0).abs() <= 0.9, "center {center}");
        // Voxel 5 mm outside the surface along +x.
        let out = *sdf.get(31, 16, 16);
        assert!((out - 5.0).abs() <= 0.9, "outside {out}");
        assert!(out > 0.0);
    }

    #[test]
    fn single_voxel_gives_plain_distance() {
        let g = GridGeometry::new([7, 6, 5], [1.0, 0.5, 2.0], [0.0; 3]).unwrap();
        let m = BinaryMask::from_grid(VoxelGrid::from_fn(g, |i, j, k| (i, j, k) == (3, 2, 1)));
        let sdf = signed_distance(&m).unwrap();
        let c = g.world(3, 2, 1);
        for idx in 0..g.len() {
            let v = sdf.data()[idx];
            if idx == g.index(3, 2, 1) {
                // nearest outside voxel is one step along the finest axis
                assert!((v + 0.5).abs() < 1e-12);
            } else {
                let d = (g.world_of_index(idx) - c).norm();
                assert!((v - d).abs() < 1e-9, "{v} vs {d}");
            }
        }
    }

    #[test]
    fn half_space_is_linear() {
        let g = GridGeometry::unit([12, 4, 4]);
        let m = BinaryMask::from_grid(VoxelGrid::from_fn(g, |i, _, _| i < 6));
        let sdf = signed_distance(&m).unwrap();
        for k in 0..4 {
            for j in 0..4 {
                for i in 0..12 {
                    let expect = if i < 6 { -(6.0 - i as f64) } else { i as f64 - 5.0 };
                    assert_eq!(*sdf.get(i, j, k), expect);
                }
            }
        }
    }

    #[test]
    fn degenerate_masks_are_rejected() {
        let g = GridGeometry::unit([3, 3, 3]);
        let full = BinaryMask::from_grid(VoxelGrid::filled(g, true));
        let empty = BinaryMask::from_grid(VoxelGrid::filled(g, false));
        assert!(matches!(signed_distance(&full), Err(Error::Degenerate(_))));
        assert!(matches!(signed_distance(&empty), Err(Error::Degenerate(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn matches_brute_force(bits in proptest::collection::vec(any::<bool>(), 5 * 6 * 4),
                               sx in 0.5f64..2.0, sy in 0.5f64..2.0, sz in 0.5f64..2.0) {
            prop_assume!(bits.iter().any(|&b| b) && bits.iter().any(|&b| !b));
            let g = GridGeometry::new([5, 6, 4], [sx, sy, sz], [1.0, -2.0, 0.5]).unwrap();
            let grid = VoxelGrid::from_vec(g, bits).unwrap();
            let sdf = signed_distance(&BinaryMask::from_grid(grid.clone())).unwrap();
            let oracle = brute_sdf(&grid);
            for (a, b) in sdf.data().iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
            }
        }

        #[test]
        fn sign_and_lipschitz(bits in proptest::collection::vec(prop::bool::weighted(0.4), 6 * 6 * 6)) {
            prop_assume!(bits.iter().any(|&b| b) && bits.iter().any(|&b| !b));
            let g = GridGeometry::unit([6, 6, 6]);
            let grid = VoxelGrid::from_vec(g, bits).unwrap();
            let sdf = signed_distance(&BinaryMask::from_grid(grid.clone())).unwrap();
            for i in 0..g.len() {
                prop_assert_eq!(sdf.data()[i] < 0.0, grid.data()[i]);
                for j in (i + 1..g.len()).step_by(7) {
                    let d = (g.world_of_index(i) - g.world_of_index(j)).norm();
                    prop_assert!((sdf.data()[i] - sdf.data()[j]).abs() <= d + 2.0 * g.max_spacing() + 1e-12);
                }
            }
        }
    }
}
