use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::manifest::{to_json, write_atomic, LambdaRecord, RunManifest};
use super::{generate_phantom, initialize_surfaces, PipelineConfig, StageTime};
use crate::collision::{pair_report, self_intersection_fraction, surface_pairs, IntersectionReport};
use crate::deform::{multiscale_deform, VelocityField};
use crate::error::{Error, Result, StageExt};
use crate::meshing::io::{encode_obj, encode_ply};
use crate::meshing::{diagnostics, read_mesh};
use crate::metrics::{evaluate_surfaces, SurfaceSet};
use crate::volume::{load_label_volume, save_label_volume, SurfaceId};

pub const LABELS_FILE: &str = "labels.nii.gz";
pub const METRICS_JSON: &str = "metrics.json";
pub const METRICS_CSV: &str = "metrics.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_SCHEMA_VERSION: u32 = 1;

struct Clock(Vec<StageTime>);

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f();
        self.0.push(StageTime {
            stage: stage.into(),
            seconds: t.elapsed().as_secs_f64(),
        });
        out
    }
}

fn output_dir(config: &PipelineConfig) -> Result<&Path> {
    let dir = config.output.as_path();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir)
}

/// `dir/<surface>.ply`, else `dir/<surface>.obj`.
pub fn find_mesh(dir: &Path, surface: SurfaceId) -> Option<PathBuf> {
    ["ply", "obj"]
        .iter()
        .map(|ext| dir.join(format!("{}.{ext}", surface.name())))
        .find(|p| p.is_file())
}

/// Reads all four surfaces from `dir`; a missing file is an I/O error.
pub fn load_surface_set(dir: &Path) -> Result<SurfaceSet> {
    SurfaceId::ALL
        .iter()
        .map(|&s| {
            let path = find_mesh(dir, s).unwrap_or_else(|| dir.join(format!("{}.ply", s.name())));
            read_mesh(&path).map(|m| (s, m))
        })
        .collect()
}

/// Writes one file per surface and returns the file names.
pub fn write_surface_set(dir: &Path, set: &SurfaceSet, config: &PipelineConfig) -> Result<Vec<String>> {
    set.iter()
        .map(|(s, m)| {
            let name = format!("{}.{}", s.name(), config.mesh_format.extension());
            let bytes = match config.mesh_format {
                super::MeshFileFormat::Ply => encode_ply(m),
                super::MeshFileFormat::Obj => encode_obj(m).into_bytes(),
            };
            write_atomic(&dir.join(&name), &bytes)?;
            Ok(name)
        })
        .collect()
}

/// Fills diagnostics, self-intersections and pairwise collisions, with a
/// warning for every departure from clean genus-0 surfaces.
fn inspect(set: &SurfaceSet, config: &PipelineConfig, manifest: &mut RunManifest) {
    for (&s, m) in set {
        let d = diagnostics(m);
        if d.genus != Some(0) || d.component_count != 1 {
            manifest.warnings.push(format!(
                "{}: not a single genus-0 surface (genus {:?}, {} components)",
                s.name(),
                d.genus,
                d.component_count
            ));
        }
        let sif = self_intersection_fraction(m);
        if sif.pairs > 0 {
            manifest
                .warnings
                .push(format!("{}: {} self-intersecting faces", s.name(), sif.faces.len()));
        }
        manifest.diagnostics.insert(s, d);
        manifest.self_intersections.insert(s, sif);
    }
    if set.len() == SurfaceId::ALL.len() {
        manifest.collisions = collision_reports(set, config.metrics.cross_pairs);
        for c in manifest.collisions.iter().filter(|c| !c.is_clear()) {
            manifest
                .warnings
                .push(format!("{}|{}: {} intersecting face pairs", c.pair[0], c.pair[1], c.contacts));
        }
    }
}

fn finish(mut manifest: RunManifest, dir: &Path, clock: Clock) -> Result<RunManifest> {
    manifest.timings = clock.0;
    manifest.save(dir)?;
    Ok(manifest)
}

/// Writes a synthetic two-hemisphere label volume.
pub fn cmd_phantom(config: &PipelineConfig) -> Result<RunManifest> {
    let dir = output_dir(config)?;
    let mut clock = Clock(Vec::new());
    let (labels, info) = clock.time("generate", || generate_phantom(&config.phantom_spec()))?;
    clock.time("write", || save_label_volume(&dir.join(LABELS_FILE), &labels))?;
    let mut m = RunManifest::new("phantom", config);
    m.phantom = Some(info);
    m.outputs.push(LABELS_FILE.into());
    finish(m, dir, clock)
}

/// Label volume to four collision-free surfaces.
pub fn cmd_init_surfaces(config: &PipelineConfig) -> Result<RunManifest> {
    config.validate()?;
    let path = config
        .labels
        .as_deref()
        .ok_or_else(|| Error::Argument("init-surfaces needs a label volume".into()))?;
    let dir = output_dir(config)?;
    let mut clock = Clock(Vec::new());
    let labels = clock.time("load", || load_label_volume(path).stage("load"))?;
    let out = initialize_surfaces(&labels, &config.init)?;
    clock.0.extend(out.timings);
    let e = out.extraction;
    let mut m = RunManifest::new("init-surfaces", config);
    m.lambda = Some(LambdaRecord {
        pial: e.lambda_pial,
        white: e.lambda_white,
        pial_adjustments: e.pial_adjustments,
        white_adjustments: e.white_adjustments,
        history: e.history,
    });
    m.fields = out.summaries;
    clock.time("inspect", || {
        inspect(&e.meshes, config, &mut m);
        Ok(())
    })?;
    m.outputs = clock.time("write", || write_surface_set(dir, &e.meshes, config))?;
    finish(m, dir, clock)
}

/// Warps the four surfaces by the integrated velocity fields.
pub fn cmd_deform(config: &PipelineConfig) -> Result<RunManifest> {
    config.validate()?;
    let mesh_dir = config
        .meshes
        .as_deref()
        .ok_or_else(|| Error::Argument("deform needs a mesh directory".into()))?;
    if config.svfs.is_empty() {
        return Err(Error::Argument("deform needs at least one velocity field".into()));
    }
    let dir = output_dir(config)?;
    let mut clock = Clock(Vec::new());
    let meshes = clock.time("load_meshes", || load_surface_set(mesh_dir))?;
    let svfs = clock.time("load_fields", || {
        config.svfs.iter().map(|p| VelocityField::load(p)).collect::<Result<Vec<_>>>()
    })?;
    let r = clock.time("deform", || {
        multiscale_deform(&meshes, &svfs, config.deformation.steps, config.deformation.sigma).stage("deform")
    })?;
    let mut m = RunManifest::new("deform", config);
    m.levels = r.deformation.levels;
    m.warnings = r.warnings;
    clock.time("inspect", || {
        inspect(&r.meshes, config, &mut m);
        Ok(())
    })?;
    m.outputs = clock.time("write", || write_surface_set(dir, &r.meshes, config))?;
    finish(m, dir, clock)
}

fn load_for_metrics(dir: Option<&Path>, role: &str) -> Result<SurfaceSet> {
    let dir = dir.ok_or_else(|| Error::Argument(format!("metrics needs a {role} mesh directory")))?;
    let missing: Vec<&str> = SurfaceId::ALL
        .iter()
        .filter(|&&s| find_mesh(dir, s).is_none())
        .map(|s| s.name())
        .collect();
    if !missing.is_empty() {
        let expected: Vec<&str> = SurfaceId::ALL.iter().map(|s| s.name()).collect();
        return Err(Error::Argument(format!(
            "{role} meshes in {} lack {}; expected {}",
            dir.display(),
            missing.join(", "),
            expected.join(", ")
        )));
    }
    load_surface_set(dir)
}

/// Surface metrics of predicted against reference meshes.
pub fn cmd_metrics(config: &PipelineConfig) -> Result<RunManifest> {
    config.validate()?;
    let predicted = load_for_metrics(config.meshes.as_deref(), "predicted")?;
    let reference = load_for_metrics(config.reference.as_deref(), "reference")?;
    let dir = output_dir(config)?;
    let mut clock = Clock(Vec::new());
    let report = clock.time("metrics", || evaluate_surfaces(&predicted, &reference, &config.metrics_options()))?;
    let mut m = RunManifest::new("metrics", config);
    clock.time("write", || {
        write_atomic(&dir.join(METRICS_JSON), &to_json(&report)?)?;
        m.outputs.push(METRICS_JSON.into());
        if config.csv {
            write_atomic(&dir.join(METRICS_CSV), report.to_csv().as_bytes())?;
            m.outputs.push(METRICS_CSV.into());
        }
        Ok(())
    })?;
    m.collisions = report.collisions.clone();
    m.metrics = Some(report);
    finish(m, dir, clock)
}

/// Self-intersection and pairwise collision check of a surface set.
pub fn cmd_collide(config: &PipelineConfig) -> Result<RunManifest> {
    config.validate()?;
    let mesh_dir = config
        .meshes
        .as_deref()
        .ok_or_else(|| Error::Argument("collide needs a mesh directory".into()))?;
    let dir = output_dir(config)?;
    let mut clock = Clock(Vec::new());
    let set = clock.time("load", || load_surface_set(mesh_dir))?;
    let mut m = RunManifest::new("collide", config);
    clock.time("inspect", || {
        inspect(&set, config, &mut m);
        Ok(())
    })?;
    finish(m, dir, clock)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub surface: String,
    pub metric: String,
    /// Runs contributing to this row.
    pub n: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub schema_version: u32,
    pub runs: usize,
    pub sources: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl AggregateReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("surface,metric,n,mean,sd\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.surface, r.metric, r.n, r.mean, r.sd));
        }
        out
    }
}

/// Mean and standard deviation of every metric row across manifests.
pub fn aggregate_manifests(paths: &[PathBuf]) -> Result<AggregateReport> {
    if paths.is_empty() {
        return Err(Error::Argument("report needs at least one manifest".into()));
    }
    let mut order: Vec<(String, &'static str)> = Vec::new();
    let mut values: BTreeMap<(String, &'static str), Vec<f64>> = BTreeMap::new();
    for path in paths {
        let manifest = RunManifest::load(path)?;
        let metrics = manifest.metrics.ok_or_else(|| Error::Schema {
            path: path.clone(),
            message: "manifest holds no metrics".into(),
        })?;
        if metrics.schema_version != crate::metrics::METRICS_SCHEMA_VERSION {
            return Err(Error::Schema {
                path: path.clone(),
                message: format!("metrics schema version {}", metrics.schema_version),
            });
        }
        for (s, metric, v) in metrics.rows() {
            let key = (s, metric);
            let entry = values.entry(key.clone()).or_default();
            if entry.is_empty() {
                order.push(key);
            }
            entry.push(v);
        }
    }
    let rows = order
        .into_iter()
        .map(|key| {
            let v = &values[&key];
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
            ReportRow {
                surface: key.0,
                metric: key.1.into(),
                n: v.len(),
                mean,
                sd,
            }
        })
        .collect();
    Ok(AggregateReport {
        schema_version: REPORT_SCHEMA_VERSION,
        runs: paths.len(),
        sources: paths.iter().map(|p| p.display().to_string()).collect(),
        rows,
    })
}

/// Aggregates metric manifests into `report.json` (and `report.csv`).
pub fn cmd_report(manifests: &[PathBuf], config: &PipelineConfig) -> Result<AggregateReport> {
    let report = aggregate_manifests(manifests)?;
    let dir = output_dir(config)?;
    write_atomic(&dir.join(REPORT_JSON), &to_json(&report)?)?;
    if config.csv {
        write_atomic(&dir.join(REPORT_CSV), report.to_csv().as_bytes())?;
    }
    Ok(report)
}

/// Reports for the four standard pairs, plus the cross pairs on request.
pub fn collision_reports(set: &SurfaceSet, cross_pairs: bool) -> Vec<IntersectionReport> {
    let n = if cross_pairs { 6 } else { 4 };
    surface_pairs()[..n]
        .iter()
        .map(|&(a, b)| pair_report(a, &set[&a], b, &set[&b]))
        .collect()
}
