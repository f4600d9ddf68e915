use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::grid::VoxelGrid;
use super::labels::BinaryMask;
use crate::error::{Error, Result};

/// Voxel adjacency: shared face (6), face or edge (18), or any contact (26).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Connectivity {
    #[serde(rename = "6")]
    Six,
    #[serde(rename = "18")]
    Eighteen,
    #[default]
    #[serde(rename = "26")]
    TwentySix,
}

impl Connectivity {
    pub fn from_count(n: u32) -> Result<Self> {
        match n {
            6 => Ok(Connectivity::Six),
            18 => Ok(Connectivity::Eighteen),
            26 => Ok(Connectivity::TwentySix),
            other => Err(Error::Argument(format!(
                "connectivity must be 6, 18 or 26, got {other}"
            ))),
        }
    }

    /// Whether a unit offset with the given number of nonzero components is adjacent.
    #[inline]
    pub fn admits(self, nonzero: usize) -> bool {
        match self {
            Connectivity::Six => nonzero == 1,
            Connectivity::Eighteen => nonzero == 1 || nonzero == 2,
            Connectivity::TwentySix => (1..=3).contains(&nonzero),
        }
    }

    pub fn offsets(self) -> Vec<[i64; 3]> {
        let mut out = Vec::new();
        for dz in -1..=1i64 {
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let nz = (dx != 0) as usize + (dy != 0) as usize + (dz != 0) as usize;
                    if self.admits(nz) {
                        out.push([dx, dy, dz]);
                    }
                }
            }
        }
        out
    }
}

/// Component labelling; returns per-voxel component id (0 = background) and
/// voxel count per component (index 0 unused). Components are numbered in
/// order of their smallest linear index.
pub fn label_components(mask: &VoxelGrid<bool>, connectivity: Connectivity) -> (Vec<u32>, Vec<usize>) {
    let g = *mask.geometry();
    let offsets = connectivity.offsets();
    let mut ids = vec![0u32; g.len()];
    let mut sizes = vec![0usize];
    let mut queue = VecDeque::new();
    for seed in 0..g.len() {
        if !mask.data()[seed] || ids[seed] != 0 {
            continue;
        }
        let id = sizes.len() as u32;
        let mut size = 0usize;
        ids[seed] = id;
        queue.push_back(seed);
        while let Some(v) = queue.pop_front() {
            size += 1;
            let [i, j, k] = g.coords(v);
            for off in &offsets {
                let (ni, nj, nk) = (i as i64 + off[0], j as i64 + off[1], k as i64 + off[2]);
                if !g.contains(ni, nj, nk) {
                    continue;
                }
                let n = g.index(ni as usize, nj as usize, nk as usize);
                if mask.data()[n] && ids[n] == 0 {
                    ids[n] = id;
                    queue.push_back(n);
                }
            }
        }
        sizes.push(size);
    }
    (ids, sizes)
}

/// Keeps the connected component with the most voxels. Ties go to the
/// component whose first voxel has the smaller linear index.
pub fn largest_component(mask: &BinaryMask, connectivity: Connectivity) -> BinaryMask {
    let (ids, sizes) = label_components(mask.grid(), connectivity);
    let mut best = 0u32;
    let mut best_size = 0usize;
    for (id, &size) in sizes.iter().enumerate().skip(1) {
        if size > best_size {
            best = id as u32;
            best_size = size;
        }
    }
    let data = ids.iter().map(|&id| best != 0 && id == best).collect();
    let grid = VoxelGrid::from_vec(*mask.geometry(), data).expect("same geometry");
    BinaryMask::with_labels(grid, mask.labels().clone())
}
