use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DeformationField, VelocityField};
use crate::error::{Error, Result};
use crate::volume::{smooth_samples, ScalarField, VoxelGrid};
use crate::Vec3;

pub const DEFAULT_STEPS: u32 = 7;

/// How the map for flow time `2^-K` is approximated before squaring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStep {
    /// `x + h v(x)`, first order in `h`.
    Euler,
    /// `x + h v(x + h v(x) / 2)`, second order in `h`.
    #[default]
    Midpoint,
}

/// Gaussian smoothing of every component, `sigma` in mm.
pub fn smooth_svf(v: &VelocityField, sigma: f64) -> Result<VelocityField> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Argument(format!("sigma must be a finite value >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(v.clone());
    }
    let g = *v.geometry();
    let comps: Vec<Vec<f64>> = (0..3)
        .into_par_iter()
        .map(|c| {
            let mut data: Vec<f64> = v.data().iter().map(|x| x[c]).collect();
            smooth_samples(&g, &mut data, sigma);
            data
        })
        .collect();
    let data = (0..g.len()).map(|i| [comps[0][i], comps[1][i], comps[2][i]]).collect();
    VelocityField::new(VoxelGrid::from_vec(g, data)?)
}

/// `outer ∘ inner`: at every voxel `x`, `outer` is sampled at `inner(x)`.
pub fn compose(outer: &DeformationField, inner: &DeformationField) -> Result<DeformationField> {
    if !outer.geometry().same_as(inner.geometry()) {
        return Err(Error::Argument(format!(
            "cannot compose fields on different grids ({:?} vs {:?})",
            outer.geometry(),
            inner.geometry()
        )));
    }
    let g = *inner.geometry();
    let data = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let u = Vec3::from(inner.data()[i]);
            let y = g.world_of_index(i) + u;
            let w = u + outer.displacement(&y);
            [w.x, w.y, w.z]
        })
        .collect();
    DeformationField::new(VoxelGrid::from_vec(g, data)?)
}

/// Time-1 flow of `v` by scaling and squaring with `steps` squarings and
/// the default initial step.
pub fn scaling_and_squaring(v: &VelocityField, steps: u32) -> Result<DeformationField> {
    scaling_and_squaring_with(v, steps, InitialStep::default())
}

pub fn scaling_and_squaring_with(v: &VelocityField, steps: u32, initial: InitialStep) -> Result<DeformationField> {
    if steps == 0 || steps > 30 {
        return Err(Error::Argument(format!("steps must be in 1..=30, got {steps}")));
    }
    let g = *v.geometry();
    let h = 0.5f64.powi(steps as i32);
    let data = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let vi = Vec3::from(v.data()[i]);
            let u = match initial {
                InitialStep::Euler => vi * h,
                InitialStep::Midpoint => {
                    let mid = g.world_of_index(i) + vi * (0.5 * h);
                    v.sample(&mid) * h
                }
            };
            [u.x, u.y, u.z]
        })
        .collect();
    let mut phi = DeformationField::new(VoxelGrid::from_vec(g, data)?)?;
    for _ in 0..steps {
        phi = compose(&phi, &phi)?;
    }
    Ok(phi)
}

/// Determinant of the Jacobian of `φ = id + u` at every voxel: central
/// differences inside, one-sided differences on the border.
pub fn jacobian_determinant(phi: &DeformationField) -> Result<ScalarField> {
    let g = *phi.geometry();
    if g.dims.iter().any(|&d| d < 3) {
        return Err(Error::Argument(format!(
            "jacobian needs at least 3 voxels per axis, got {:?}",
            g.dims
        )));
    }
    let u = phi.data();
    let data = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let c = g.coords(i);
            let mut m = [[0.0; 3]; 3];
            for axis in 0..3 {
                let n = g.dims[axis];
                let (lo, hi) = match c[axis] {
                    0 => (0, 1),
                    x if x == n - 1 => (n - 2, n - 1),
                    x => (x - 1, x + 1),
                };
                let at = |t: usize| {
                    let mut q = c;
                    q[axis] = t;
                    u[g.index(q[0], q[1], q[2])]
                };
                let (a, b) = (at(lo), at(hi));
                let dx = (hi - lo) as f64 * g.spacing[axis];
                for row in 0..3 {
                    m[row][axis] = (b[row] - a[row]) / dx + if row == axis { 1.0 } else { 0.0 };
                }
            }
            nalgebra::Matrix3::from_fn(|r, col| m[r][col]).determinant()
        })
        .collect();
    VoxelGrid::from_vec(g, data)
}

/// Smallest value over voxels at least `margin` voxels from every face.
pub fn interior_min(field: &ScalarField, margin: usize) -> Option<f64> {
    let g = field.geometry();
    let inside = |c: [usize; 3]| (0..3).all(|a| c[a] >= margin && c[a] + margin < g.dims[a]);
    field
        .data()
        .iter()
        .enumerate()
        .filter(|(i, _)| inside(g.coords(*i)))
        .map(|(_, &v)| v)
        .reduce(f64::min)
}
