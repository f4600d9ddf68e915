use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collision::{adaptive_threshold_extraction, ExtractionConfig, ExtractionResult, SurfaceFields};
use crate::error::{Result, StageExt};
use crate::topology::topology_correct;
use crate::volume::{
    build_mask, gaussian_smooth, largest_component, signed_distance, Connectivity, LabelVolume, ScalarField,
    SurfaceId,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitConfig {
    /// Gaussian smoothing of the signed distance fields, mm.
    pub sdf_sigma: f64,
    pub extraction: ExtractionConfig,
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig {
            sdf_sigma: 1.0,
            extraction: ExtractionConfig::default(),
        }
    }
}

/// Per-surface bookkeeping of the field preparation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub mask_voxels: usize,
    /// Voxels dropped by keeping only the largest component.
    pub dropped_voxels: usize,
    pub corrected_voxels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTime {
    pub stage: String,
    pub seconds: f64,
}

pub struct InitOutput {
    pub fields: BTreeMap<SurfaceId, ScalarField>,
    pub summaries: BTreeMap<SurfaceId, FieldSummary>,
    pub extraction: ExtractionResult,
    pub timings: Vec<StageTime>,
}

/// Mask, largest 26-component, signed distance, smoothing and topology
/// correction for one surface.
pub fn prepare_field(labels: &LabelVolume, surface: SurfaceId, sigma: f64) -> Result<(ScalarField, FieldSummary)> {
    let mask = build_mask(labels, &surface.label_set()).stage("mask")?;
    let kept = largest_component(&mask, Connectivity::TwentySix);
    let sdf = signed_distance(&kept).stage("signed_distance")?;
    let smooth = gaussian_smooth(&sdf, sigma).stage("smoothing")?;
    let corrected = topology_correct(&smooth).stage("topology")?;
    Ok((
        corrected.corrected,
        FieldSummary {
            mask_voxels: mask.count(),
            dropped_voxels: mask.count() - kept.count(),
            corrected_voxels: corrected.modified_voxel_count,
        },
    ))
}

/// Four collision-free genus-0 surfaces from a label volume.
pub fn initialize_surfaces(labels: &LabelVolume, config: &InitConfig) -> Result<InitOutput> {
    let t0 = Instant::now();
    let prepared = SurfaceId::ALL
        .par_iter()
        .map(|&s| {
            prepare_field(labels, s, config.sdf_sigma)
                .map(|r| (s, r))
                .map_err(|e| e.in_stage(s.name()))
        })
        .collect::<Result<Vec<_>>>()?;
    let t1 = Instant::now();
    let mut fields = BTreeMap::new();
    let mut summaries = BTreeMap::new();
    for (s, (f, summary)) in prepared {
        fields.insert(s, f);
        summaries.insert(s, summary);
    }
    let extraction = adaptive_threshold_extraction(
        SurfaceFields {
            lh_pial: &fields[&SurfaceId::LhPial],
            rh_pial: &fields[&SurfaceId::RhPial],
            lh_white: &fields[&SurfaceId::LhWhite],
            rh_white: &fields[&SurfaceId::RhWhite],
        },
        &config.extraction,
    )
    .stage("extraction")?;
    let t2 = Instant::now();
    Ok(InitOutput {
        fields,
        summaries,
        extraction,
        timings: vec![
            StageTime {
                stage: "fields".into(),
                seconds: (t1 - t0).as_secs_f64(),
            },
            StageTime {
                stage: "extraction".into(),
                seconds: (t2 - t1).as_secs_f64(),
            },
        ],
    })
}
