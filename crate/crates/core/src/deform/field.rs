use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::volume::io::{read_volume, write_volume, DataType, VolumeData};
use crate::volume::{trilinear_sample, GridGeometry, VoxelGrid};
use crate::Vec3;

/// Stationary velocity field in mm per unit flow time, one `(vx, vy, vz)`
/// triple per voxel.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    grid: VoxelGrid<[f64; 3]>,
}

/// Map `φ(x) = x + u(x)`, stored as the displacement `u` at every voxel.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationField {
    grid: VoxelGrid<[f64; 3]>,
}

fn check_finite(grid: &VoxelGrid<[f64; 3]>, what: &str) -> Result<()> {
    match grid.data().iter().position(|v| v.iter().any(|c| !c.is_finite())) {
        Some(i) => Err(Error::Validation(format!(
            "{what} has a non-finite component at voxel {:?}",
            grid.geometry().coords(i)
        ))),
        None => Ok(()),
    }
}

fn from_interleaved(geometry: GridGeometry, values: &[f64]) -> Result<VoxelGrid<[f64; 3]>> {
    if values.len() != 3 * geometry.len() {
        return Err(Error::Argument(format!(
            "expected {} interleaved components, got {}",
            3 * geometry.len(),
            values.len()
        )));
    }
    VoxelGrid::from_vec(geometry, values.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())
}

macro_rules! vector_grid_common {
    ($t:ident, $what:literal) => {
        impl $t {
            pub fn new(grid: VoxelGrid<[f64; 3]>) -> Result<Self> {
                check_finite(&grid, $what)?;
                Ok($t { grid })
            }

            pub fn zeros(geometry: GridGeometry) -> Self {
                $t {
                    grid: VoxelGrid::filled(geometry, [0.0; 3]),
                }
            }

            /// Evaluates `f` at the world position of every voxel.
            pub fn from_world_fn(geometry: GridGeometry, f: impl Fn(Vec3) -> Vec3 + Sync) -> Result<Self> {
                let data = (0..geometry.len())
                    .into_par_iter()
                    .map(|i| {
                        let v = f(geometry.world_of_index(i));
                        [v.x, v.y, v.z]
                    })
                    .collect();
                Self::new(VoxelGrid::from_vec(geometry, data)?)
            }

            /// Builds a field from `(x, y, z)` triples interleaved per voxel.
            pub fn from_interleaved(geometry: GridGeometry, values: &[f64]) -> Result<Self> {
                Self::new(from_interleaved(geometry, values)?)
            }

            pub fn geometry(&self) -> &GridGeometry {
                self.grid.geometry()
            }

            pub fn grid(&self) -> &VoxelGrid<[f64; 3]> {
                &self.grid
            }

            pub fn data(&self) -> &[[f64; 3]] {
                self.grid.data()
            }

            pub fn to_interleaved(&self) -> Vec<f64> {
                self.grid.data().iter().flatten().copied().collect()
            }

            /// Trilinear sample at a world point, clamped to the grid box.
            #[inline]
            pub fn sample(&self, p: &Vec3) -> Vec3 {
                Vec3::from(trilinear_sample(&self.grid, p))
            }

            /// Largest vector norm over all voxels.
            pub fn max_norm(&self) -> f64 {
                self.grid
                    .data()
                    .iter()
                    .map(|v| Vec3::from(*v).norm())
                    .fold(0.0, f64::max)
            }

            pub fn load(path: &Path) -> Result<Self> {
                let vol = read_volume(path)?;
                if vol.components() != 3 {
                    return Err(Error::Format(format!(
                        "{}: expected a 3-component vector volume",
                        path.display()
                    )));
                }
                Self::from_interleaved(vol.geometry, &vol.values)
            }

            /// Writes a NIfTI (`dim[4] = 3`) or raw `float32x3` volume.
            pub fn save(&self, path: &Path) -> Result<()> {
                write_volume(
                    path,
                    &VolumeData {
                        geometry: *self.geometry(),
                        dtype: DataType::F32x3,
                        values: self.to_interleaved(),
                    },
                )
            }
        }
    };
}

vector_grid_common!(VelocityField, "velocity field");
vector_grid_common!(DeformationField, "deformation field");

impl VelocityField {
    pub fn scaled(&self, s: f64) -> VelocityField {
        VelocityField {
            grid: self.grid.map(|v| [v[0] * s, v[1] * s, v[2] * s]),
        }
    }
}

impl DeformationField {
    pub fn identity(geometry: GridGeometry) -> Self {
        Self::zeros(geometry)
    }

    /// Displacement `u(x) = φ(x) − x` at a world point.
    #[inline]
    pub fn displacement(&self, p: &Vec3) -> Vec3 {
        self.sample(p)
    }

    /// `φ(p)`.
    #[inline]
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        p + self.sample(p)
    }

    /// `φ` at voxel `index`, exactly as stored.
    #[inline]
    pub fn mapped_voxel(&self, index: usize) -> Vec3 {
        self.geometry().world_of_index(index) + Vec3::from(self.grid.data()[index])
    }

    pub fn is_identity(&self) -> bool {
        self.grid.data().iter().all(|v| v.iter().all(|&c| c == 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_sampling() {
        let g = GridGeometry::new([4, 5, 6], [1.0, 0.5, 2.0], [1.0, 2.0, 3.0]).unwrap();
        let v = VelocityField::from_world_fn(g, |p| Vec3::new(p.x, 2.0 * p.y, -p.z)).unwrap();
        // Linear fields are reproduced exactly inside the grid.
        let p = Vec3::new(2.3, 3.1, 7.9);
        assert!((v.sample(&p) - Vec3::new(p.x, 2.0 * p.y, -p.z)).norm() < 1e-12);
        let flat = v.to_interleaved();
        assert_eq!(VelocityField::from_interleaved(g, &flat).unwrap(), v);
        assert!(VelocityField::from_interleaved(g, &flat[1..]).is_err());
        let mut bad = flat.clone();
        bad[7] = f64::NAN;
        assert!(matches!(VelocityField::from_interleaved(g, &bad), Err(Error::Validation(_))));
    }

    #[test]
    fn identity_has_zero_displacement() {
        let g = GridGeometry::unit([3, 3, 3]);
        let id = DeformationField::identity(g);
        assert!(id.is_identity());
        let p = Vec3::new(0.4, 1.7, 2.0);
        assert_eq!(id.apply(&p), p);
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridGeometry::new([3, 4, 2], [1.5, 1.0, 2.0], [-1.0, 0.0, 4.0]).unwrap();
        // Values representable in f32 survive exactly.
        let v = VelocityField::from_world_fn(g, |p| Vec3::new(p.x * 0.5, p.y - 1.0, 0.25)).unwrap();
        for name in ["v.nii", "v.nii.gz", "v.json"] {
            let path = dir.path().join(name);
            v.save(&path).unwrap();
            assert_eq!(VelocityField::load(&path).unwrap(), v, "{name}");
        }
    }
}
