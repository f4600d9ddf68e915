use super::grid::{GridGeometry, VoxelGrid};
use crate::Vec3;

/// Values that can be blended linearly by trilinear interpolation.
pub trait Lerp: Copy {
    fn zero() -> Self;
    fn add_scaled(self, other: Self, w: f64) -> Self;
}

impl Lerp for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn add_scaled(self, other: Self, w: f64) -> Self {
        self + w * other
    }
}

impl Lerp for [f64; 3] {
    #[inline]
    fn zero() -> Self {
        [0.0; 3]
    }
    #[inline]
    fn add_scaled(self, o: Self, w: f64) -> Self {
        [self[0] + w * o[0], self[1] + w * o[1], self[2] + w * o[2]]
    }
}

/// Lower corner index and fractional offset along one axis, clamped to the grid.
#[inline]
fn axis_cell(c: f64, n: usize) -> (usize, f64) {
    if n == 1 {
        return (0, 0.0);
    }
    let max = (n - 1) as f64;
    let mut c = if c.is_nan() { 0.0 } else { c.clamp(0.0, max) };
    // Snap rounding noise from the world-to-index division onto voxel centres.
    let r = c.round();
    if (c - r).abs() < 1e-9 {
        c = r;
    }
    let lo = (c.floor() as usize).min(n - 2);
    (lo, c - lo as f64)
}

/// Trilinear weights of the 8 cell corners around a world point, after
/// clamping the point into the grid's voxel-centre box.
#[inline]
pub(crate) fn corner_weights(g: &GridGeometry, p: &Vec3) -> ([usize; 8], [f64; 8]) {
    let c = g.continuous_index(p);
    let (i0, fx) = axis_cell(c[0], g.dims[0]);
    let (j0, fy) = axis_cell(c[1], g.dims[1]);
    let (k0, fz) = axis_cell(c[2], g.dims[2]);
    let i1 = (i0 + 1).min(g.dims[0] - 1);
    let j1 = (j0 + 1).min(g.dims[1] - 1);
    let k1 = (k0 + 1).min(g.dims[2] - 1);
    let idx = [
        g.index(i0, j0, k0),
        g.index(i1, j0, k0),
        g.index(i0, j1, k0),
        g.index(i1, j1, k0),
        g.index(i0, j0, k1),
        g.index(i1, j0, k1),
        g.index(i0, j1, k1),
        g.index(i1, j1, k1),
    ];
    let (gx, gy, gz) = (1.0 - fx, 1.0 - fy, 1.0 - fz);
    let w = [
        gx * gy * gz,
        fx * gy * gz,
        gx * fy * gz,
        fx * fy * gz,
        gx * gy * fz,
        fx * gy * fz,
        gx * fy * fz,
        fx * fy * fz,
    ];
    (idx, w)
}

/// Trilinear interpolation at a world point. Points outside the voxel-centre
/// box are clamped to its nearest point.
pub fn trilinear_sample<T: Lerp>(field: &VoxelGrid<T>, p: &Vec3) -> T {
    let (idx, w) = corner_weights(field.geometry(), p);
    let data = field.data();
    let mut acc = T::zero();
    for c in 0..8 {
        if w[c] != 0.0 {
            acc = acc.add_scaled(data[idx[c]], w[c]);
        }
    }
    acc
}
