use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{InitConfig, PhantomSpec};
use crate::error::{Error, Result};
use crate::metrics::{LossWeights, MetricsOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFileFormat {
    #[default]
    Ply,
    Obj,
}

impl MeshFileFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MeshFileFormat::Ply => "ply",
            MeshFileFormat::Obj => "obj",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeformConfig {
    /// Scaling-and-squaring steps.
    pub steps: u32,
    /// Gaussian smoothing of each velocity field, mm; 0 disables it.
    pub sigma: f64,
}

impl Default for DeformConfig {
    fn default() -> Self {
        DeformConfig { steps: 7, sigma: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub samples: usize,
    pub hausdorff_percentile: f64,
    /// Also check the two cross-hemisphere pial/white pairs.
    pub cross_pairs: bool,
    pub weights: LossWeights,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        let o = MetricsOptions::default();
        MetricsConfig {
            samples: o.samples,
            hausdorff_percentile: o.hausdorff_percentile,
            cross_pairs: o.cross_pairs,
            weights: o.weights,
        }
    }
}

/// Shape of generated phantoms; the seed is the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhantomConfig {
    pub dims: [usize; 3],
    pub spacing: f64,
    pub gap_mm: Option<f64>,
    pub touching: bool,
}

impl Default for PhantomConfig {
    fn default() -> Self {
        let s = PhantomSpec::default();
        PhantomConfig {
            dims: s.dims,
            spacing: s.spacing,
            gap_mm: s.gap_mm,
            touching: s.touching,
        }
    }
}

/// Everything a run depends on. Paths are used as given, relative ones
/// against the working directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Label volume for `init-surfaces`.
    pub labels: Option<PathBuf>,
    /// Directory holding `lh_pial`, `rh_pial`, `lh_white` and `rh_white`
    /// meshes (deformation input, metric prediction, collision check).
    pub meshes: Option<PathBuf>,
    /// Directory of reference meshes for `metrics`.
    pub reference: Option<PathBuf>,
    /// Velocity fields, coarsest first.
    pub svfs: Vec<PathBuf>,
    pub output: PathBuf,
    pub seed: u64,
    pub mesh_format: MeshFileFormat,
    /// Also write `metrics.csv` / `report.csv` next to the JSON.
    pub csv: bool,
    pub init: InitConfig,
    pub deformation: DeformConfig,
    pub metrics: MetricsConfig,
    pub phantom: PhantomConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            labels: None,
            meshes: None,
            reference: None,
            svfs: Vec::new(),
            output: PathBuf::from("out"),
            seed: 0,
            mesh_format: MeshFileFormat::Ply,
            csv: true,
            init: InitConfig::default(),
            deformation: DeformConfig::default(),
            metrics: MetricsConfig::default(),
            phantom: PhantomConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Reads a config file, or the `config` snapshot of a run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let schema = |message: String| Error::Schema {
            path: path.to_path_buf(),
            message,
        };
        let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| schema(e.to_string()))?;
        if value.get("schema_version").is_some() {
            if let Some(c) = value.get_mut("config") {
                value = c.take();
            }
        }
        serde_json::from_value(value).map_err(|e| schema(e.to_string()))
    }

    pub fn metrics_options(&self) -> MetricsOptions {
        MetricsOptions {
            weights: self.metrics.weights,
            samples: self.metrics.samples,
            seed: self.seed,
            hausdorff_percentile: self.metrics.hausdorff_percentile,
            cross_pairs: self.metrics.cross_pairs,
        }
    }

    pub fn phantom_spec(&self) -> PhantomSpec {
        PhantomSpec {
            dims: self.phantom.dims,
            spacing: self.phantom.spacing,
            gap_mm: self.phantom.gap_mm,
            touching: self.phantom.touching,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.init.extraction.validate()?;
        if !(self.init.sdf_sigma >= 0.0 && self.init.sdf_sigma.is_finite()) {
            return Err(Error::Argument(format!("sdf_sigma must be non-negative, got {}", self.init.sdf_sigma)));
        }
        if !(1..=30).contains(&self.deformation.steps) {
            return Err(Error::Argument(format!(
                "deformation steps must be within 1..=30, got {}",
                self.deformation.steps
            )));
        }
        if !(self.deformation.sigma >= 0.0 && self.deformation.sigma.is_finite()) {
            return Err(Error::Argument(format!("deformation sigma must be non-negative, got {}", self.deformation.sigma)));
        }
        if self.metrics.samples == 0 {
            return Err(Error::Argument("metrics samples must be positive".into()));
        }
        let p = self.metrics.hausdorff_percentile;
        if !(p > 0.0 && p <= 100.0) {
            return Err(Error::Argument(format!("hausdorff percentile {p} outside (0, 100]")));
        }
        Ok(())
    }
}
