use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{mesh_pair_intersections, IntersectionReport};
use crate::error::{Error, Result};
use crate::meshing::{diagnostics, laplacian_smooth, marching_cubes, TriangleMesh};
use crate::volume::{ScalarField, SurfaceId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionConfig {
    pub lambda_pial_init: f64,
    pub pial_step: f64,
    /// White-surface iso value relative to the final pial one.
    pub wm_offset: f64,
    pub wm_step: f64,
    /// Largest number of threshold adjustments per surface kind.
    pub max_iterations: usize,
    pub smoothing_iterations: usize,
    pub smoothing_step: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            lambda_pial_init: -0.1,
            pial_step: -0.05,
            wm_offset: -0.1,
            wm_step: -0.1,
            max_iterations: 20,
            smoothing_iterations: 5,
            smoothing_step: 0.5,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Argument(m));
        if !self.lambda_pial_init.is_finite() {
            return bad(format!("lambda_pial_init {} is not finite", self.lambda_pial_init));
        }
        for (name, v) in [
            ("pial_step", self.pial_step),
            ("wm_offset", self.wm_offset),
            ("wm_step", self.wm_step),
        ] {
            if !(v < 0.0 && v.is_finite()) {
                return bad(format!("{name} must be negative, got {v}"));
            }
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.smoothing_step > 0.0 && self.smoothing_step <= 1.0) {
            return bad(format!("smoothing_step {} outside (0, 1]", self.smoothing_step));
        }
        Ok(())
    }
}

/// Corrected distance fields for the four surfaces.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceFields<'a> {
    pub lh_pial: &'a ScalarField,
    pub rh_pial: &'a ScalarField,
    pub lh_white: &'a ScalarField,
    pub rh_white: &'a ScalarField,
}

impl<'a> SurfaceFields<'a> {
    pub fn get(&self, s: SurfaceId) -> &'a ScalarField {
        match s {
            SurfaceId::LhPial => self.lh_pial,
            SurfaceId::RhPial => self.rh_pial,
            SurfaceId::LhWhite => self.lh_white,
            SurfaceId::RhWhite => self.rh_white,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Pial,
    White,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionAttempt {
    pub surfaces: SurfaceKind,
    pub lambda: f64,
    /// Intersecting face pairs found at this threshold.
    pub contacts: usize,
}

#[derive(Debug, Clone)]
pub struct ExtractionResult {
    pub meshes: BTreeMap<SurfaceId, TriangleMesh>,
    pub lambda_pial: f64,
    pub lambda_white: f64,
    pub pial_adjustments: usize,
    pub white_adjustments: usize,
    pub history: Vec<ExtractionAttempt>,
    /// The six pairwise reports of the final meshes, see [`surface_pairs`].
    pub reports: Vec<IntersectionReport>,
}

/// Surface pairs checked for collisions. The first four are the standard
/// set (left/right pial, left/right white, pial/white per hemisphere); the
/// last two are the cross-hemisphere pial/white pairs.
pub fn surface_pairs() -> [(SurfaceId, SurfaceId); 6] {
    use SurfaceId::*;
    [
        (LhPial, RhPial),
        (LhWhite, RhWhite),
        (LhPial, LhWhite),
        (RhPial, RhWhite),
        (LhPial, RhWhite),
        (RhPial, LhWhite),
    ]
}

pub fn pair_report(a: SurfaceId, ma: &TriangleMesh, b: SurfaceId, mb: &TriangleMesh) -> IntersectionReport {
    let mut r = mesh_pair_intersections(ma, mb);
    r.pair = [a.name().to_string(), b.name().to_string()];
    r
}

/// Marching cubes at `lambda`, Laplacian smoothing, then rounding to the
/// `f32` precision used by mesh files, so that collision checks see exactly
/// what gets written.
pub fn extract_surface(field: &ScalarField, lambda: f64, config: &ExtractionConfig) -> Result<TriangleMesh> {
    let mesh = marching_cubes(field, lambda)?;
    let mut mesh = laplacian_smooth(&mesh, config.smoothing_iterations, config.smoothing_step)?;
    mesh.round_to_f32();
    Ok(mesh)
}

/// Lowers the pial threshold (both hemispheres together) until the two pial
/// surfaces are disjoint, then lowers the shared white threshold until each
/// white surface is clear of all other surfaces.
pub fn adaptive_threshold_extraction(fields: SurfaceFields<'_>, config: &ExtractionConfig) -> Result<ExtractionResult> {
    use SurfaceId::*;
    config.validate()?;
    let mut history = Vec::new();

    let mut k = 0;
    let (lambda_pial, lh_pial, rh_pial) = loop {
        let lambda = config.lambda_pial_init + k as f64 * config.pial_step;
        let lh = extract_surface(fields.lh_pial, lambda, config)?;
        let rh = extract_surface(fields.rh_pial, lambda, config)?;
        let r = pair_report(LhPial, &lh, RhPial, &rh);
        history.push(ExtractionAttempt {
            surfaces: SurfaceKind::Pial,
            lambda,
            contacts: r.contacts,
        });
        if r.is_clear() {
            break (lambda, lh, rh);
        }
        if k == config.max_iterations {
            return Err(Error::NonConvergence {
                stage: "pial",
                iterations: k,
                reports: vec![r],
            });
        }
        k += 1;
    };
    let pial_adjustments = k;

    let lambda_white0 = lambda_pial + config.wm_offset;
    let mut k = 0;
    let (lambda_white, lh_white, rh_white) = loop {
        let lambda = lambda_white0 + k as f64 * config.wm_step;
        let lh = extract_surface(fields.lh_white, lambda, config)?;
        let rh = extract_surface(fields.rh_white, lambda, config)?;
        let reports = vec![
            pair_report(LhWhite, &lh, LhPial, &lh_pial),
            pair_report(LhWhite, &lh, RhPial, &rh_pial),
            pair_report(LhWhite, &lh, RhWhite, &rh),
            pair_report(RhWhite, &rh, LhPial, &lh_pial),
            pair_report(RhWhite, &rh, RhPial, &rh_pial),
        ];
        let contacts = reports.iter().map(|r| r.contacts).sum();
        history.push(ExtractionAttempt {
            surfaces: SurfaceKind::White,
            lambda,
            contacts,
        });
        if contacts == 0 {
            break (lambda, lh, rh);
        }
        if k == config.max_iterations {
            return Err(Error::NonConvergence {
                stage: "white",
                iterations: k,
                reports: reports.into_iter().filter(|r| !r.is_clear()).collect(),
            });
        }
        k += 1;
    };
    let white_adjustments = k;

    let meshes: BTreeMap<SurfaceId, TriangleMesh> =
        [(LhPial, lh_pial), (RhPial, rh_pial), (LhWhite, lh_white), (RhWhite, rh_white)].into();
    for (s, m) in &meshes {
        let d = diagnostics(m);
        if !d.is_closed || d.genus != Some(0) || d.component_count != 1 {
            return Err(Error::Topology(format!(
                "{s} is not a closed genus-0 surface (closed: {}, components: {}, genus: {:?})",
                d.is_closed, d.component_count, d.genus
            )));
        }
    }
    let reports = surface_pairs()
        .iter()
        .map(|&(a, b)| pair_report(a, &meshes[&a], b, &meshes[&b]))
        .collect();
    Ok(ExtractionResult {
        meshes,
        lambda_pial,
        lambda_white,
        pial_adjustments,
        white_adjustments,
        history,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{GridGeometry, VoxelGrid};

    /// Distance to a sphere divided by `scale`, so a threshold step of δ
    /// moves the surface by δ·scale millimetres.
    fn ball(g: GridGeometry, c: [f64; 3], r: f64, scale: f64) -> ScalarField {
        VoxelGrid::from_fn(g, |i, j, k| {
            let p = g.world(i, j, k);
            (((p.x - c[0]).powi(2) + (p.y - c[1]).powi(2) + (p.z - c[2]).powi(2)).sqrt() - r) / scale
        })
    }

    fn fields(gap: f64, scale: f64) -> (ScalarField, ScalarField, ScalarField, ScalarField) {
        let g = GridGeometry::unit([48, 32, 32]);
        let r = 9.0;
        // Pial surfaces at λ sit at radius r + λ·scale.
        let cl = [23.5 - r - gap / 2.0, 15.5, 15.5];
        let cr = [23.5 + r + gap / 2.0, 15.5, 15.5];
        (
            ball(g, cl, r, scale),
            ball(g, cr, r, scale),
            ball(g, cl, r - 3.0, scale),
            ball(g, cr, r - 3.0, scale),
        )
    }

    fn run_with(f: &(ScalarField, ScalarField, ScalarField, ScalarField), cfg: &ExtractionConfig) -> Result<ExtractionResult> {
        adaptive_threshold_extraction(
            SurfaceFields {
                lh_pial: &f.0,
                rh_pial: &f.1,
                lh_white: &f.2,
                rh_white: &f.3,
            },
            cfg,
        )
    }

    fn run(f: &(ScalarField, ScalarField, ScalarField, ScalarField)) -> Result<ExtractionResult> {
        run_with(f, &ExtractionConfig::default())
    }

    fn assert_clean(r: &ExtractionResult) {
        assert_eq!(r.reports.len(), 6);
        assert!(r.reports.iter().all(|x| x.is_clear()));
        for m in r.meshes.values() {
            assert_eq!(diagnostics(m).genus, Some(0));
        }
        assert!(r.lambda_white <= r.lambda_pial - 0.1 + 1e-12);
    }

    #[test]
    fn separated_surfaces_need_no_adjustment() {
        let r = run(&fields(4.0, 1.0)).unwrap();
        assert_eq!((r.pial_adjustments, r.white_adjustments), (0, 0));
        assert_eq!(r.lambda_pial, -0.1);
        assert!((r.lambda_white + 0.2).abs() < 1e-12);
        assert_clean(&r);
    }

    #[test]
    fn overlapping_pial_surfaces_take_two_steps() {
        // Scale 6.67 mm per unit: each -0.05 step shrinks each sphere by
        // 0.33 mm. The spheres overlap by 1 mm at λ = -0.1 (gap -1.67 at λ=0
        // plus 2·0.67 mm) and are 0.33 mm apart at λ = -0.2. Smoothing would
        // shrink the spheres by about 0.2 mm, so it is off here.
        let scale = 20.0 / 3.0;
        let cfg = ExtractionConfig {
            smoothing_iterations: 0,
            ..Default::default()
        };
        let r = run_with(&fields(-1.0 - 2.0 * 0.1 * scale, scale), &cfg).unwrap();
        assert_eq!(r.pial_adjustments, 2);
        assert!((r.lambda_pial + 0.2).abs() < 1e-12);
        assert_clean(&r);
        let pial: Vec<_> = r.history.iter().filter(|h| h.surfaces == SurfaceKind::Pial).collect();
        assert!(pial[0].contacts > 0 && pial[1].contacts > 0 && pial[2].contacts == 0);
    }

    #[test]
    fn white_equal_to_pial_is_clear_at_offset() {
        let mut f = fields(4.0, 1.0);
        f.2 = f.0.clone();
        f.3 = f.1.clone();
        let r = run(&f).unwrap();
        assert_clean(&r);
        // At the pial threshold minus 0.1 the white surfaces already sit
        // inside the pial ones, so no extra step is needed.
        assert_eq!(r.white_adjustments, 0);
        assert_eq!(r.pial_adjustments, 0);
    }

    #[test]
    fn non_convergence_carries_reports() {
        // Hemispheres that overlap at every threshold.
        let f = fields(-30.0, 1.0);
        let cfg = ExtractionConfig {
            max_iterations: 2,
            ..Default::default()
        };
        let err = adaptive_threshold_extraction(
            SurfaceFields {
                lh_pial: &f.0,
                rh_pial: &f.1,
                lh_white: &f.2,
                rh_white: &f.3,
            },
            &cfg,
        )
        .unwrap_err();
        match err {
            Error::NonConvergence { stage, iterations, reports } => {
                assert_eq!((stage, iterations), ("pial", 2));
                assert!(!reports[0].is_clear());
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn config_validation() {
        let mut c = ExtractionConfig::default();
        assert!(c.validate().is_ok());
        c.pial_step = 0.05;
        assert!(c.validate().is_err());
        let c = ExtractionConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
