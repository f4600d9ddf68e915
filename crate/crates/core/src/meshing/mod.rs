//! Triangle meshes: isosurface extraction, smoothing, diagnostics, sampling and file I/O.

mod diagnostics;
pub mod io;
mod marching_cubes;
mod mesh;
pub mod primitives;
mod sample;
mod smooth;

pub use diagnostics::{diagnostics, MeshDiagnostics};
pub use io::{read_mesh, write_mesh};
pub use marching_cubes::marching_cubes;
pub use mesh::TriangleMesh;
pub use sample::sample_surface_points;
pub use smooth::laplacian_smooth;
