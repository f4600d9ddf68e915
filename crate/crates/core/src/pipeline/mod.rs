//! End-to-end commands: phantom generation, surface initialization,
//! deformation, metrics, collision checks and report aggregation.

mod commands;
mod config;
mod init;
mod manifest;
pub mod phantom;

pub use init::{initialize_surfaces, prepare_field, FieldSummary, InitConfig, InitOutput, StageTime};
pub use phantom::{generate_phantom, PhantomInfo, PhantomSpec};
pub use commands::{
    aggregate_manifests, cmd_collide, cmd_deform, cmd_init_surfaces, cmd_metrics, cmd_phantom, cmd_report,
    collision_reports, find_mesh, load_surface_set, write_surface_set, AggregateReport, ReportRow, LABELS_FILE,
    METRICS_CSV, METRICS_JSON, REPORT_CSV, REPORT_JSON, REPORT_SCHEMA_VERSION,
};
pub use config::{DeformConfig, MeshFileFormat, MetricsConfig, PhantomConfig, PipelineConfig};
pub use manifest::{write_atomic, LambdaRecord, RunManifest, MANIFEST_FILE, MANIFEST_SCHEMA_VERSION};
