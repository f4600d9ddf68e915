use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FieldSummary, PhantomInfo, PipelineConfig, StageTime};
use crate::collision::{ExtractionAttempt, IntersectionReport, SelfIntersection};
use crate::deform::LevelSummary;
use crate::error::{Error, Result};
use crate::meshing::MeshDiagnostics;
use crate::metrics::MetricsReport;
use crate::volume::SurfaceId;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Iso values chosen by the adaptive extraction loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRecord {
    pub pial: f64,
    pub white: f64,
    pub pial_adjustments: usize,
    pub white_adjustments: usize,
    pub history: Vec<ExtractionAttempt>,
}

/// Record of one command run, written last into the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: PipelineConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phantom: Option<PhantomInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaRecord>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fields: BTreeMap<SurfaceId, FieldSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelSummary>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<SurfaceId, MeshDiagnostics>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub self_intersections: BTreeMap<SurfaceId, SelfIntersection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub collisions: Vec<IntersectionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
    /// Files written by the run, relative to the output directory.
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    pub timings: Vec<StageTime>,
}

impl RunManifest {
    pub fn new(command: &str, config: &PipelineConfig) -> Self {
        RunManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            phantom: None,
            lambda: None,
            fields: BTreeMap::new(),
            levels: Vec::new(),
            diagnostics: BTreeMap::new(),
            self_intersections: BTreeMap::new(),
            collisions: Vec::new(),
            metrics: None,
            outputs: Vec::new(),
            warnings: Vec::new(),
            timings: Vec::new(),
        }
    }

    /// Reads a manifest, rejecting other schema versions.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let schema = |message: String| Error::Schema {
            path: path.to_path_buf(),
            message,
        };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| schema(e.to_string()))?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == MANIFEST_SCHEMA_VERSION as u64 => {}
            Some(v) => {
                return Err(schema(format!(
                    "schema version {v}, expected {MANIFEST_SCHEMA_VERSION}"
                )))
            }
            None => return Err(schema("no schema_version".into())),
        }
        serde_json::from_value(value).map_err(|e| schema(e.to_string()))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        write_atomic(&dir.join(MANIFEST_FILE), &to_json(self)?)
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Argument(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}
