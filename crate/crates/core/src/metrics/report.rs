use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assd, chamfer, edge_loss, hausdorff, normal_consistency_loss};
use crate::collision::{pair_report, self_intersection_fraction, surface_pairs, IntersectionReport};
use crate::error::{Error, Result};
use crate::meshing::{sample_surface_points, TriangleMesh};
use crate::volume::SurfaceId;

pub const METRICS_SCHEMA_VERSION: u32 = 1;

/// Meshes keyed by the surface they represent.
pub type SurfaceSet = BTreeMap<SurfaceId, TriangleMesh>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossWeights {
    pub chamfer: f64,
    pub edge: f64,
    pub normal: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            chamfer: 1.0,
            edge: 0.7,
            normal: 0.7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsOptions {
    pub weights: LossWeights,
    /// Points sampled per surface.
    pub samples: usize,
    pub seed: u64,
    pub hausdorff_percentile: f64,
    /// Also report the two cross-hemisphere pial/white pairs.
    pub cross_pairs: bool,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            weights: LossWeights::default(),
            samples: 150_000,
            seed: 0,
            hausdorff_percentile: 100.0,
            cross_pairs: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMetrics {
    pub surface: SurfaceId,
    pub chamfer_mm2: f64,
    pub assd_mm: f64,
    pub hausdorff_mm: f64,
    pub sif_percent: f64,
    /// Sorted ids of the self-intersecting faces of the predicted mesh.
    pub sif_faces: Vec<u32>,
    pub edge_loss: f64,
    pub normal_consistency_loss: f64,
    /// Weighted sum of the three loss terms for this surface.
    pub mesh_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricAverages {
    pub chamfer_mm2: f64,
    pub assd_mm: f64,
    pub hausdorff_mm: f64,
    pub sif_percent: f64,
    pub edge_loss: f64,
    pub normal_consistency_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub options: MetricsOptions,
    pub surfaces: Vec<SurfaceMetrics>,
    pub average: MetricAverages,
    /// Sum of the per-surface mesh losses.
    pub mesh_loss: f64,
    pub collisions: Vec<IntersectionReport>,
}

/// Independent sampling seed per surface and side.
fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_sets(predicted: &SurfaceSet, reference: &SurfaceSet) -> Result<()> {
    let p: Vec<_> = predicted.keys().collect();
    let r: Vec<_> = reference.keys().collect();
    if p.is_empty() || p != r {
        let names = |v: &[&SurfaceId]| v.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ");
        return Err(Error::Argument(format!(
            "predicted surfaces [{}] do not match reference surfaces [{}]",
            names(&p),
            names(&r)
        )));
    }
    Ok(())
}

fn surface_metrics(
    surface: SurfaceId,
    pred: &TriangleMesh,
    reference: &TriangleMesh,
    o: &MetricsOptions,
) -> Result<SurfaceMetrics> {
    let stream = 2 * surface as u64;
    let p = sample_surface_points(pred, o.samples, derive_seed(o.seed, stream))?.with_source(surface);
    let q = sample_surface_points(reference, o.samples, derive_seed(o.seed, stream + 1))?.with_source(surface);
    let chamfer_mm2 = chamfer(&p, &q)?;
    let edge = edge_loss(pred)?;
    let normal = normal_consistency_loss(pred).loss;
    let sif = self_intersection_fraction(pred);
    Ok(SurfaceMetrics {
        surface,
        chamfer_mm2,
        assd_mm: assd(&p, &q)?,
        hausdorff_mm: hausdorff(&p, &q, o.hausdorff_percentile)?,
        sif_percent: sif.percent,
        sif_faces: sif.faces,
        edge_loss: edge,
        normal_consistency_loss: normal,
        mesh_loss: o.weights.chamfer * chamfer_mm2 + o.weights.edge * edge + o.weights.normal * normal,
    })
}

/// Surface distances, losses and self-intersection for every surface, plus
/// pairwise collision reports of the predicted set when all four surfaces
/// are present.
pub fn evaluate_surfaces(predicted: &SurfaceSet, reference: &SurfaceSet, options: &MetricsOptions) -> Result<MetricsReport> {
    check_sets(predicted, reference)?;
    if options.samples == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let surfaces = predicted
        .par_iter()
        .map(|(&s, m)| surface_metrics(s, m, &reference[&s], options))
        .collect::<Result<Vec<_>>>()?;
    let n = surfaces.len() as f64;
    let avg = |f: fn(&SurfaceMetrics) -> f64| surfaces.iter().map(f).sum::<f64>() / n;
    let average = MetricAverages {
        chamfer_mm2: avg(|s| s.chamfer_mm2),
        assd_mm: avg(|s| s.assd_mm),
        hausdorff_mm: avg(|s| s.hausdorff_mm),
        sif_percent: avg(|s| s.sif_percent),
        edge_loss: avg(|s| s.edge_loss),
        normal_consistency_loss: avg(|s| s.normal_consistency_loss),
    };
    let collisions = if predicted.len() == SurfaceId::ALL.len() {
        let count = if options.cross_pairs { 6 } else { 4 };
        surface_pairs()[..count]
            .iter()
            .map(|&(a, b)| pair_report(a, &predicted[&a], b, &predicted[&b]))
            .collect()
    } else {
        Vec::new()
    };
    Ok(MetricsReport {
        schema_version: METRICS_SCHEMA_VERSION,
        options: *options,
        mesh_loss: surfaces.iter().map(|s| s.mesh_loss).sum(),
        surfaces,
        average,
        collisions,
    })
}

/// Combined loss `Σ_s w_cd·chamfer + w_edge·edge + w_nc·normal` over matched
/// surfaces, with the full per-surface breakdown.
pub fn mesh_loss(
    predicted: &SurfaceSet,
    reference: &SurfaceSet,
    weights: LossWeights,
    samples: usize,
    seed: u64,
) -> Result<MetricsReport> {
    let options = MetricsOptions {
        weights,
        samples,
        seed,
        ..Default::default()
    };
    evaluate_surfaces(predicted, reference, &options)
}

impl MetricsReport {
    /// `(surface, metric, value)` triples; the `mean` surface holds
    /// averages and pairs are named `a|b`.
    pub fn rows(&self) -> Vec<(String, &'static str, f64)> {
        let mut out = Vec::new();
        let mut row = |s: &str, m: &'static str, v: f64| out.push((s.to_string(), m, v));
        for s in &self.surfaces {
            let name = s.surface.name();
            row(name, "chamfer_mm2", s.chamfer_mm2);
            row(name, "assd_mm", s.assd_mm);
            row(name, "hausdorff_mm", s.hausdorff_mm);
            row(name, "sif_percent", s.sif_percent);
            row(name, "edge_loss", s.edge_loss);
            row(name, "normal_consistency_loss", s.normal_consistency_loss);
            row(name, "mesh_loss", s.mesh_loss);
        }
        let a = &self.average;
        row("mean", "chamfer_mm2", a.chamfer_mm2);
        row("mean", "assd_mm", a.assd_mm);
        row("mean", "hausdorff_mm", a.hausdorff_mm);
        row("mean", "sif_percent", a.sif_percent);
        row("mean", "edge_loss", a.edge_loss);
        row("mean", "normal_consistency_loss", a.normal_consistency_loss);
        row("total", "mesh_loss", self.mesh_loss);
        for c in &self.collisions {
            let pair = format!("{}|{}", c.pair[0], c.pair[1]);
            row(&pair, "percent_face_a", c.percent_a);
            row(&pair, "percent_face_b", c.percent_b);
            row(&pair, "contacts", c.contacts as f64);
        }
        out
    }

    /// Rows of `surface,metric,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("surface,metric,value\n");
        for (s, m, v) in self.rows() {
            out.push_str(&format!("{s},{m},{v}\n"));
        }
        out
    }
}
