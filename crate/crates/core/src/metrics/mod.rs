//! Point-cloud surface distances, mesh regularity terms and metric reports.

mod cloud;
mod kdtree;
mod mesh_terms;
mod report;

pub use cloud::{assd, chamfer, hausdorff, nearest_neighbor_index, PointCloud};
pub use kdtree::KdTree;
pub use mesh_terms::{edge_loss, normal_consistency_loss, NormalConsistency};
pub use report::{
    evaluate_surfaces, mesh_loss, LossWeights, MetricAverages, MetricsOptions, MetricsReport, SurfaceMetrics,
    SurfaceSet, METRICS_SCHEMA_VERSION,
};
