//! Label volumes to collision-free genus-0 cortical surface meshes.
//!
//! The crate covers the geometric core of a surface reconstruction pipeline:
//! voxel grids and label maps ([`volume`]), digital topology correction
//! ([`topology`]), isosurface extraction and mesh diagnostics ([`meshing`]),
//! triangle collision detection and the adaptive iso-value loop
//! ([`collision`]), diffeomorphic deformation by stationary velocity fields
//! ([`deform`]), surface metrics ([`metrics`]) and the command-line
//! orchestration ([`pipeline`]).

pub mod collision;
pub mod deform;
pub mod error;
pub mod meshing;
pub mod metrics;
pub mod pipeline;
pub mod topology;
pub mod volume;

/// World-space point or vector in millimetres.
pub type Vec3 = nalgebra::Vector3<f64>;

pub use error::{Error, ErrorCategory, Result};
