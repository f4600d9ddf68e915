//! Triangle intersection tests, bounding volume hierarchies and the adaptive
//! iso-value extraction loop.

mod adaptive;
mod bvh;
mod query;
mod report;
mod triangle;

pub use adaptive::{
    adaptive_threshold_extraction, extract_surface, pair_report, surface_pairs, ExtractionAttempt,
    ExtractionConfig, ExtractionResult, SurfaceKind, SurfaceFields,
};
pub use bvh::{Aabb, Bvh, BvhNode};
pub use query::{brute_force, mesh_pair_intersections, self_intersection_fraction, SelfIntersection};
pub use report::IntersectionReport;
pub use triangle::{tri_tri_intersect, Segment, Triangle, MIN_AREA, PLANE_EPS};
