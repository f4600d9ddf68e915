use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{interior_min, jacobian_determinant, scaling_and_squaring, smooth_svf, DeformationField, VelocityField};
use crate::error::{Error, Result};
use crate::meshing::TriangleMesh;
use crate::metrics::SurfaceSet;
use crate::volume::SurfaceId;

/// Moves every vertex by the field's displacement at that vertex.
pub fn warp_mesh(mesh: &TriangleMesh, phi: &DeformationField) -> TriangleMesh {
    TriangleMesh {
        vertices: mesh.vertices.par_iter().map(|v| phi.apply(v)).collect(),
        faces: mesh.faces.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub dims: [usize; 3],
    pub max_velocity_mm: f64,
    pub max_displacement_mm: f64,
    pub min_jacobian: f64,
}

#[derive(Debug, Clone)]
pub struct MultiscaleDeformation {
    /// One map per level, in application order.
    pub maps: Vec<DeformationField>,
    pub levels: Vec<LevelSummary>,
}

#[derive(Debug, Clone)]
pub struct DeformResult {
    pub meshes: SurfaceSet,
    pub deformation: MultiscaleDeformation,
    pub warnings: Vec<String>,
}

/// Integrates each (smoothed) velocity field into a map.
pub fn integrate_levels(svfs: &[VelocityField], steps: u32, sigma: f64) -> Result<MultiscaleDeformation> {
    if svfs.is_empty() {
        return Err(Error::Argument("at least one velocity field is required".into()));
    }
    let mut maps = Vec::with_capacity(svfs.len());
    let mut levels = Vec::with_capacity(svfs.len());
    for (level, v) in svfs.iter().enumerate() {
        let smoothed = smooth_svf(v, sigma)?;
        let phi = scaling_and_squaring(&smoothed, steps)?;
        let jac = jacobian_determinant(&phi)?;
        levels.push(LevelSummary {
            level: level + 1,
            dims: v.geometry().dims,
            max_velocity_mm: smoothed.max_norm(),
            max_displacement_mm: phi.max_norm(),
            min_jacobian: interior_min(&jac, 0).unwrap_or(f64::NAN),
        });
        maps.push(phi);
    }
    Ok(MultiscaleDeformation { maps, levels })
}

/// Warps all four surfaces by the same sequence of maps. A level whose map
/// has a non-positive Jacobian determinant somewhere is reported as a
/// warning, not an error.
pub fn multiscale_deform(meshes: &SurfaceSet, svfs: &[VelocityField], steps: u32, sigma: f64) -> Result<DeformResult> {
    let missing: Vec<&str> = SurfaceId::ALL
        .iter()
        .filter(|s| !meshes.contains_key(s))
        .map(|s| s.name())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Argument(format!("missing surfaces: {}", missing.join(", "))));
    }
    let deformation = integrate_levels(svfs, steps, sigma)?;
    let mut out = meshes.clone();
    for phi in &deformation.maps {
        for m in out.values_mut() {
            *m = warp_mesh(m, phi);
        }
    }
    let warnings = deformation
        .levels
        .iter()
        .filter(|l| !(l.min_jacobian > 0.0))
        .map(|l| format!("level {}: non-positive Jacobian determinant (min {})", l.level, l.min_jacobian))
        .collect();
    Ok(DeformResult {
        meshes: out,
        deformation,
        warnings,
    })
}
