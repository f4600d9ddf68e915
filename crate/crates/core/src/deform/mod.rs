//! Deformation of meshes by the time-1 flows of stationary velocity fields.
//!
//! Fields live on their own voxel grids in world millimetres and are sampled
//! trilinearly with clamping, so maps on grids of different resolution can be
//! applied one after another.

mod field;
mod integrate;
pub mod synthetic;
mod warp;

pub use field::{DeformationField, VelocityField};
pub use integrate::{
    compose, interior_min, jacobian_determinant, scaling_and_squaring, scaling_and_squaring_with, smooth_svf,
    InitialStep, DEFAULT_STEPS,
};
pub use warp::{integrate_levels, multiscale_deform, warp_mesh, DeformResult, LevelSummary, MultiscaleDeformation};
