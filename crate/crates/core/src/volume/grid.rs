use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// Shape and placement of a regular voxel lattice.
///
/// Voxel `(i, j, k)` sits at `origin + (i*sx, j*sy, k*sz)` in world millimetres,
/// and linear indices are x-fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
}

impl GridGeometry {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Argument(format!("grid dims must be positive, got {dims:?}")));
        }
        if spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::Argument(format!(
                "grid spacing must be finite and positive, got {spacing:?}"
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Argument(format!("grid origin must be finite, got {origin:?}")));
        }
        Ok(GridGeometry {
            dims,
            spacing,
            origin,
        })
    }

    /// Unit-spaced grid with its first voxel at the world origin.
    pub fn unit(dims: [usize; 3]) -> Self {
        GridGeometry::new(dims, [1.0; 3], [0.0; 3]).expect("unit grid dims must be positive")
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn coords(&self, index: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [index % nx, (index / nx) % ny, index / (nx * ny)]
    }

    #[inline]
    pub fn contains(&self, i: i64, j: i64, k: i64) -> bool {
        i >= 0
            && j >= 0
            && k >= 0
            && (i as usize) < self.dims[0]
            && (j as usize) < self.dims[1]
            && (k as usize) < self.dims[2]
    }

    #[inline]
    pub fn world(&self, i: usize, j: usize, k: usize) -> Vec3 {
        Vec3::new(
            self.origin[0] + i as f64 * self.spacing[0],
            self.origin[1] + j as f64 * self.spacing[1],
            self.origin[2] + k as f64 * self.spacing[2],
        )
    }

    #[inline]
    pub fn world_of_index(&self, index: usize) -> Vec3 {
        let [i, j, k] = self.coords(index);
        self.world(i, j, k)
    }

    /// Fractional voxel coordinates of a world point (not clamped).
    #[inline]
    pub fn continuous_index(&self, p: &Vec3) -> [f64; 3] {
        [
            (p.x - self.origin[0]) / self.spacing[0],
            (p.y - self.origin[1]) / self.spacing[1],
            (p.z - self.origin[2]) / self.spacing[2],
        ]
    }

    /// World-space corners of the box spanned by voxel centres.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        (
            self.world(0, 0, 0),
            self.world(self.dims[0] - 1, self.dims[1] - 1, self.dims[2] - 1),
        )
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::MIN, f64::max)
    }

    /// Same dims, spacing and origin, compared exactly.
    pub fn same_as(&self, other: &GridGeometry) -> bool {
        self == other
    }
}

/// Dense voxel array over a [`GridGeometry`].
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid<T> {
    geometry: GridGeometry,
    data: Vec<T>,
}

impl<T> VoxelGrid<T> {
    pub fn from_vec(geometry: GridGeometry, data: Vec<T>) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(Error::Argument(format!(
                "voxel data length {} does not match dims {:?} ({} voxels)",
                data.len(),
                geometry.dims,
                geometry.len()
            )));
        }
        Ok(VoxelGrid { geometry, data })
    }

    pub fn from_fn(geometry: GridGeometry, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(geometry.len());
        for k in 0..geometry.dims[2] {
            for j in 0..geometry.dims[1] {
                for i in 0..geometry.dims[0] {
                    data.push(f(i, j, k));
                }
            }
        }
        VoxelGrid { geometry, data }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn dims(&self) -> [usize; 3] {
        self.geometry.dims
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.data[self.geometry.index(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: T) {
        let idx = self.geometry.index(i, j, k);
        self.data[idx] = value;
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> VoxelGrid<U> {
        VoxelGrid {
            geometry: self.geometry,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> VoxelGrid<T> {
    pub fn filled(geometry: GridGeometry, value: T) -> Self {
        VoxelGrid {
            data: vec![value; geometry.len()],
            geometry,
        }
    }
}

/// Real-valued field, in millimetres for distance fields.
pub type ScalarField = VoxelGrid<f64>;

impl ScalarField {
    /// Rejects NaN and infinite samples.
    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(idx) => Err(Error::Validation(format!(
                "non-finite value at voxel {:?}",
                self.geometry.coords(idx)
            ))),
            None => Ok(()),
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let g = GridGeometry::unit([3, 4, 5]);
        for idx in 0..g.len() {
            let [i, j, k] = g.coords(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
        assert_eq!(g.index(1, 0, 0), 1);
        assert_eq!(g.index(0, 1, 0), 3);
        assert_eq!(g.index(0, 0, 1), 12);
    }

    #[test]
    fn world_coordinates_follow_spacing_and_origin() {
        let g = GridGeometry::new([4, 4, 4], [0.5, 1.0, 2.0], [10.0, -1.0, 3.0]).unwrap();
        let p = g.world(2, 3, 1);
        assert_eq!((p.x, p.y, p.z), (11.0, 2.0, 5.0));
        let c = g.continuous_index(&p);
        assert_eq!(c, [2.0, 3.0, 1.0]);
    }

    #[test]
    fn rejects_bad_geometry_and_data() {
        assert!(GridGeometry::new([0, 1, 1], [1.0; 3], [0.0; 3]).is_err());
        assert!(GridGeometry::new([1, 1, 1], [1.0, 0.0, 1.0], [0.0; 3]).is_err());
        assert!(GridGeometry::new([1, 1, 1], [1.0, -2.0, 1.0], [0.0; 3]).is_err());
        let g = GridGeometry::unit([2, 2, 2]);
        assert!(VoxelGrid::from_vec(g, vec![0u8; 7]).is_err());
        assert!(VoxelGrid::from_vec(g, vec![0u8; 8]).is_ok());
    }

    #[test]
    fn from_fn_is_x_fastest() {
        let g = GridGeometry::unit([2, 3, 2]);
        let grid = VoxelGrid::from_fn(g, |i, j, k| (i, j, k));
        for (idx, &(i, j, k)) in grid.data().iter().enumerate() {
            assert_eq!(g.index(i, j, k), idx);
        }
    }
}
