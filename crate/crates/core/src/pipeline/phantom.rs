//! Synthetic two-hemisphere label volumes.
//!
//! Each hemisphere is a superellipsoid of cortex around a shrunken copy filled
//! with white matter, with a lateral ventricle in the middle and an
//! amygdala/hippocampus blob in its lower medial part. The two hemispheres
//! face each other across a gap along x.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{label, GridGeometry, LabelVolume, VoxelGrid};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhantomSpec {
    pub dims: [usize; 3],
    pub spacing: f64,
    /// Distance between the two pial shapes at the midline; drawn from
    /// 0.2..2 mm when absent.
    pub gap_mm: Option<f64>,
    /// Interlock the hemispheres with 4-voxel teeth in a checkerboard on
    /// the midline, so they touch along a whole patch.
    pub touching: bool,
    pub seed: u64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        PhantomSpec {
            dims: [64; 3],
            spacing: 1.0,
            gap_mm: None,
            touching: false,
            seed: 0,
        }
    }
}

/// Realised shape parameters, all in mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomInfo {
    pub spec: PhantomSpec,
    pub gap_mm: f64,
    pub midline_x: f64,
    /// Semi-axes of each hemisphere's pial shape.
    pub semi_axes: [f64; 3],
    pub exponent: f64,
    pub cortex_thickness: f64,
    pub left_centre: [f64; 3],
    pub right_centre: [f64; 3],
}

#[derive(Debug, Clone, Copy)]
struct Superellipsoid {
    centre: Vec3,
    axes: Vec3,
    p: f64,
}

impl Superellipsoid {
    fn contains(&self, x: &Vec3) -> bool {
        let d = x - self.centre;
        (0..3).map(|a| (d[a] / self.axes[a]).abs().powf(self.p)).sum::<f64>() <= 1.0
    }
}

struct Hemisphere {
    pial: Superellipsoid,
    white: Superellipsoid,
    ventricle: Superellipsoid,
    amygdala: Superellipsoid,
}

impl Hemisphere {
    fn new(centre: Vec3, axes: Vec3, p: f64, thickness: f64, medial: f64) -> Self {
        let white_axes = axes.map(|a| a - thickness);
        Hemisphere {
            pial: Superellipsoid { centre, axes, p },
            white: Superellipsoid {
                centre,
                axes: white_axes,
                p,
            },
            ventricle: Superellipsoid {
                centre: centre + Vec3::new(0.0, 0.0, 0.1 * axes.z),
                axes: Vec3::new(0.2 * axes.x, 0.35 * axes.y, 0.15 * axes.z),
                p: 2.0,
            },
            // Centred on the lower medial boundary, deep enough to notch the
            // white matter as well.
            amygdala: Superellipsoid {
                centre: centre
                    + Vec3::new(
                        medial * 0.4 * axes.x,
                        -0.25 * axes.y,
                        -(1.0 - 0.4f64.powf(p) - 0.25f64.powf(p)).powf(1.0 / p) * axes.z,
                    ),
                axes: Vec3::new(0.25 * axes.x, 0.18 * axes.y, thickness + 2.0),
                p: 2.0,
            },
        }
    }

    /// Tissue at `x` for this hemisphere, if any.
    fn classify(&self, x: &Vec3, wm: u8, ctx: u8, amy: u8, vent: u8) -> Option<u8> {
        if !self.pial.contains(x) {
            None
        } else if self.amygdala.contains(x) {
            Some(amy)
        } else if self.ventricle.contains(x) {
            Some(vent)
        } else if self.white.contains(x) {
            Some(wm)
        } else {
            Some(ctx)
        }
    }
}

/// Builds the label volume described by `spec`.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<(LabelVolume, PhantomInfo)> {
    if spec.dims.iter().any(|&d| d < 32) {
        return Err(Error::Argument(format!("phantom needs at least 32 voxels per axis, got {:?}", spec.dims)));
    }
    if let Some(g) = spec.gap_mm {
        if !(0.0..=4.0).contains(&g) {
            return Err(Error::Argument(format!("gap must be within [0, 4] mm, got {g}")));
        }
    }
    let geometry = GridGeometry::new(spec.dims, [spec.spacing; 3], [0.0; 3])?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let gap = spec.gap_mm.unwrap_or_else(|| rng.gen_range(0.2..=2.0));
    let (lo, hi) = geometry.bounds();
    let mid = (lo + hi) * 0.5;
    let extent = hi - lo;
    let midline_x = mid.x + rng.gen_range(-0.5..0.5) * spec.spacing;
    // Keep at least three voxels of background around the brain.
    let margin = 3.0 * spec.spacing;
    let max_ax = (midline_x - lo.x - gap / 2.0 - margin).min(hi.x - midline_x - gap / 2.0 - margin) / 2.0;
    let axes = Vec3::new(
        max_ax * rng.gen_range(0.85..1.0),
        (extent.y / 2.0 - margin) * rng.gen_range(0.75..0.9),
        (extent.z / 2.0 - margin) * rng.gen_range(0.65..0.8),
    );
    let p = rng.gen_range(2.2..3.0);
    let thickness = rng.gen_range(2.0..3.0) * spec.spacing.max(1.0);
    let jitter = Vec3::new(0.0, rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)) * spec.spacing;
    let cl = Vec3::new(midline_x - gap / 2.0 - axes.x, mid.y, mid.z) + jitter;
    let cr = Vec3::new(midline_x + gap / 2.0 + axes.x, mid.y, mid.z) + jitter;
    let left = Hemisphere::new(cl, axes, p, thickness, 1.0);
    let right = Hemisphere::new(cr, axes, p, thickness, -1.0);

    let tooth = 2.0 * spec.spacing;
    let grid = VoxelGrid::from_fn(geometry, |i, j, k| {
        let x = geometry.world(i, j, k);
        if spec.touching && (x.x - midline_x).abs() <= tooth {
            let reach = Vec3::new(2.0 * tooth, 0.0, 0.0);
            if left.pial.contains(&(x - reach)) && right.pial.contains(&(x + reach)) {
                return if (j / 4 + k / 4) % 2 == 0 { label::LH_CORTEX } else { label::RH_CORTEX };
            }
        }
        let l = left.classify(&x, label::LH_WHITE_MATTER, label::LH_CORTEX, label::LH_AMYGDALA_HIPPOCAMPUS, label::LH_LATERAL_VENTRICLE);
        let r = right.classify(&x, label::RH_WHITE_MATTER, label::RH_CORTEX, label::RH_AMYGDALA_HIPPOCAMPUS, label::RH_LATERAL_VENTRICLE);
        l.or(r).unwrap_or(label::BACKGROUND)
    });
    let info = PhantomInfo {
        spec: *spec,
        gap_mm: gap,
        midline_x,
        semi_axes: axes.into(),
        exponent: p,
        cortex_thickness: thickness,
        left_centre: cl.into(),
        right_centre: cr.into(),
    };
    Ok((LabelVolume::new(grid)?, info))
}
