//! Nine-class tissue labels and the binary masks built from them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::grid::{GridGeometry, VoxelGrid};
use crate::error::{Error, Result};

pub const MAX_LABEL: u8 = 8;

/// Tissue class ids stored in a label volume.
pub mod label {
    pub const BACKGROUND: u8 = 0;
    pub const LH_WHITE_MATTER: u8 = 1;
    pub const LH_CORTEX: u8 = 2;
    pub const LH_AMYGDALA_HIPPOCAMPUS: u8 = 3;
    pub const LH_LATERAL_VENTRICLE: u8 = 4;
    pub const RH_WHITE_MATTER: u8 = 5;
    pub const RH_CORTEX: u8 = 6;
    pub const RH_AMYGDALA_HIPPOCAMPUS: u8 = 7;
    pub const RH_LATERAL_VENTRICLE: u8 = 8;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hemisphere {
    Left,
    Right,
}

/// One of the four reconstructed surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceId {
    #[serde(rename = "lh_pial")]
    LhPial,
    #[serde(rename = "rh_pial")]
    RhPial,
    #[serde(rename = "lh_white")]
    LhWhite,
    #[serde(rename = "rh_white")]
    RhWhite,
}

impl SurfaceId {
    pub const ALL: [SurfaceId; 4] = [
        SurfaceId::LhPial,
        SurfaceId::RhPial,
        SurfaceId::LhWhite,
        SurfaceId::RhWhite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SurfaceId::LhPial => "lh_pial",
            SurfaceId::RhPial => "rh_pial",
            SurfaceId::LhWhite => "lh_white",
            SurfaceId::RhWhite => "rh_white",
        }
    }

    pub fn from_name(name: &str) -> Option<SurfaceId> {
        SurfaceId::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn hemisphere(self) -> Hemisphere {
        match self {
            SurfaceId::LhPial | SurfaceId::LhWhite => Hemisphere::Left,
            SurfaceId::RhPial | SurfaceId::RhWhite => Hemisphere::Right,
        }
    }

    pub fn is_pial(self) -> bool {
        matches!(self, SurfaceId::LhPial | SurfaceId::RhPial)
    }

    /// Labels whose union defines the region enclosed by this surface.
    ///
    /// Pial: white matter, cortex and lateral ventricle. White: white matter
    /// and lateral ventricle. Amygdala/hippocampus is left out of both.
    pub fn label_set(self) -> BTreeSet<u8> {
        use label::*;
        let ids: &[u8] = match self {
            SurfaceId::LhPial => &[LH_WHITE_MATTER, LH_CORTEX, LH_LATERAL_VENTRICLE],
            SurfaceId::RhPial => &[RH_WHITE_MATTER, RH_CORTEX, RH_LATERAL_VENTRICLE],
            SurfaceId::LhWhite => &[LH_WHITE_MATTER, LH_LATERAL_VENTRICLE],
            SurfaceId::RhWhite => &[RH_WHITE_MATTER, RH_LATERAL_VENTRICLE],
        };
        ids.iter().copied().collect()
    }
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Voxel labels, each in `0..=8`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVolume {
    grid: VoxelGrid<u8>,
}

impl LabelVolume {
    pub fn new(grid: VoxelGrid<u8>) -> Result<Self> {
        if let Some(idx) = grid.data().iter().position(|&l| l > MAX_LABEL) {
            return Err(Error::Validation(format!(
                "label {} at voxel {:?} (linear index {idx}) is outside 0..={MAX_LABEL}",
                grid.data()[idx],
                grid.geometry().coords(idx)
            )));
        }
        Ok(LabelVolume { grid })
    }

    /// Builds a label volume from wider integers, rejecting anything outside `0..=8`.
    pub fn from_values(geometry: GridGeometry, values: &[i64]) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::Format(format!(
                "expected {} voxels, found {}",
                geometry.len(),
                values.len()
            )));
        }
        let mut data = Vec::with_capacity(values.len());
        for (idx, &v) in values.iter().enumerate() {
            if !(0..=MAX_LABEL as i64).contains(&v) {
                return Err(Error::Validation(format!(
                    "label {v} at voxel {:?} (linear index {idx}) is outside 0..={MAX_LABEL}",
                    geometry.coords(idx)
                )));
            }
            data.push(v as u8);
        }
        Ok(LabelVolume {
            grid: VoxelGrid::from_vec(geometry, data)?,
        })
    }

    pub fn grid(&self) -> &VoxelGrid<u8> {
        &self.grid
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.grid.geometry()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    grid: VoxelGrid<bool>,
    labels: BTreeSet<u8>,
}

impl BinaryMask {
    /// Mask not derived from labels (its label set is empty).
    pub fn from_grid(grid: VoxelGrid<bool>) -> Self {
        BinaryMask {
            grid,
            labels: BTreeSet::new(),
        }
    }

    pub fn with_labels(grid: VoxelGrid<bool>, labels: BTreeSet<u8>) -> Self {
        BinaryMask { grid, labels }
    }

    pub fn grid(&self) -> &VoxelGrid<bool> {
        &self.grid
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.grid.geometry()
    }

    /// Labels this mask was built from.
    pub fn labels(&self) -> &BTreeSet<u8> {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.grid.data().iter().filter(|&&b| b).count()
    }
}

/// Voxelwise membership of each label in `label_set`.
pub fn build_mask(labels: &LabelVolume, label_set: &BTreeSet<u8>) -> Result<BinaryMask> {
    if label_set.is_empty() {
        return Err(Error::Argument("label set must not be empty".into()));
    }
    if let Some(bad) = label_set.iter().find(|&&l| l > MAX_LABEL) {
        return Err(Error::Argument(format!("label {bad} is outside 0..={MAX_LABEL}")));
    }
    let mut lut = [false; MAX_LABEL as usize + 1];
    for &l in label_set {
        lut[l as usize] = true;
    }
    Ok(BinaryMask {
        grid: labels.grid.map(|&l| lut[l as usize]),
        labels: label_set.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn volume(dims: [usize; 3], data: Vec<u8>) -> LabelVolume {
        LabelVolume::new(VoxelGrid::from_vec(GridGeometry::unit(dims), data).unwrap()).unwrap()
    }

    #[test]
    fn all_cortex_gives_full_mask() {
        let v = volume([3, 3, 3], vec![label::LH_CORTEX; 27]);
        let m = build_mask(&v, &[label::LH_CORTEX].into()).unwrap();
        assert!(m.grid().data().iter().all(|&b| b));
        assert_eq!(m.labels(), &BTreeSet::from([label::LH_CORTEX]));
    }

    #[test]
    fn pial_union_covers_alternating_wm_and_cortex() {
        let data = (0..64)
            .map(|i| if i % 2 == 0 { label::LH_WHITE_MATTER } else { label::LH_CORTEX })
            .collect();
        let v = volume([4, 4, 4], data);
        let m = build_mask(&v, &SurfaceId::LhPial.label_set()).unwrap();
        assert_eq!(m.count(), 64);
        let w = build_mask(&v, &SurfaceId::LhWhite.label_set()).unwrap();
        assert_eq!(w.count(), 32);
    }

    #[test]
    fn empty_label_set_is_rejected() {
        let v = volume([1, 1, 1], vec![0]);
        assert!(matches!(build_mask(&v, &BTreeSet::new()), Err(Error::Argument(_))));
        assert!(matches!(build_mask(&v, &[9].into()), Err(Error::Argument(_))));
    }

    #[test]
    fn out_of_range_label_names_the_voxel() {
        let g = GridGeometry::unit([2, 2, 2]);
        let mut vals = vec![0i64; 8];
        vals[5] = 12;
        let err = LabelVolume::from_values(g, &vals).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Validation(_)));
        assert!(msg.contains("[1, 0, 1]") && msg.contains("12"), "{msg}");
    }

    #[test]
    fn canonical_sets_exclude_amygdala_hippocampus() {
        for s in SurfaceId::ALL {
            let set = s.label_set();
            assert!(!set.contains(&label::LH_AMYGDALA_HIPPOCAMPUS));
            assert!(!set.contains(&label::RH_AMYGDALA_HIPPOCAMPUS));
            assert!(!set.contains(&label::BACKGROUND));
        }
    }

    fn label_volume_strategy() -> impl Strategy<Value = LabelVolume> {
        proptest::collection::vec(0u8..=8, 512).prop_map(|d| volume([8, 8, 8], d))
    }

    fn label_set_strategy() -> impl Strategy<Value = BTreeSet<u8>> {
        proptest::collection::btree_set(0u8..=8, 1..=9)
    }

    proptest! {
        #[test]
        fn matches_voxel_membership(v in label_volume_strategy(), set in label_set_strategy()) {
            let m = build_mask(&v, &set).unwrap();
            for (l, b) in v.grid().data().iter().zip(m.grid().data()) {
                prop_assert_eq!(*b, set.contains(l));
            }
        }

        #[test]
        fn union_of_sets_is_or_of_masks(
            v in label_volume_strategy(),
            a in label_set_strategy(),
            b in label_set_strategy(),
        ) {
            let union: BTreeSet<u8> = a.union(&b).copied().collect();
            let mu = build_mask(&v, &union).unwrap();
            let ma = build_mask(&v, &a).unwrap();
            let mb = build_mask(&v, &b).unwrap();
            for ((u, x), y) in mu.grid().data().iter().zip(ma.grid().data()).zip(mb.grid().data()) {
                prop_assert_eq!(*u, *x || *y);
            }
        }
    }
}
