//! Topology correction of scalar fields.
//!
//! Sublevel sets are grown from the global minimum one voxel at a time in
//! ascending value order. A voxel joins only when it is a simple point for the
//! (26, 6) connectivity pair; otherwise it waits until a later acceptance makes
//! it simple and is then raised just above the level that unlocked it. Every
//! sublevel set of the result is therefore a prefix of a sequence of simple
//! additions to a single voxel, i.e. a digital ball.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::volume::{ScalarField, VoxelGrid};

const CENTER: usize = 13;

#[inline]
fn cube_offset(p: usize) -> [i64; 3] {
    [(p % 3) as i64 - 1, ((p / 3) % 3) as i64 - 1, (p / 9) as i64 - 1]
}

#[inline]
fn nonzero(o: [i64; 3]) -> usize {
    o.iter().filter(|&&c| c != 0).count()
}

struct NeighborTables {
    /// 26-adjacency between the 26 non-centre cells.
    adj26: Vec<Vec<usize>>,
    /// 6-adjacency between cells of N18 (non-centre, not a corner).
    adj6_n18: Vec<Vec<usize>>,
}

fn tables() -> &'static NeighborTables {
    static TABLES: OnceLock<NeighborTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut adj26 = vec![Vec::new(); 27];
        let mut adj6_n18 = vec![Vec::new(); 27];
        for a in 0..27 {
            for b in 0..27 {
                if a == b || a == CENTER || b == CENTER {
                    continue;
                }
                let (oa, ob) = (cube_offset(a), cube_offset(b));
                let d = [ob[0] - oa[0], ob[1] - oa[1], ob[2] - oa[2]];
                if d.iter().any(|c| c.abs() > 1) {
                    continue;
                }
                adj26[a].push(b);
                if nonzero(d) == 1 && nonzero(oa) <= 2 && nonzero(ob) <= 2 {
                    adj6_n18[a].push(b);
                }
            }
        }
        NeighborTables { adj26, adj6_n18 }
    })
}

/// Simple-point test on a 3×3×3 configuration (index `x + 3y + 9z`, centre
/// ignored). Foreground uses 26-adjacency, background 6-adjacency.
pub fn is_simple_configuration(cube: &[bool; 27]) -> bool {
    let t = tables();
    let mut seen = [false; 27];
    let mut stack = Vec::with_capacity(26);

    // Foreground components among the 26 neighbours.
    let mut fg_components = 0;
    for start in 0..27 {
        if start == CENTER || !cube[start] || seen[start] {
            continue;
        }
        fg_components += 1;
        if fg_components > 1 {
            return false;
        }
        seen[start] = true;
        stack.push(start);
        while let Some(p) = stack.pop() {
            for &q in &t.adj26[p] {
                if cube[q] && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    if fg_components != 1 {
        return false;
    }

    // Background components in N18 that touch a face neighbour of the centre,
    // connected through N18 only.
    let mut seen = [false; 27];
    let mut bg_components = 0;
    for start in [4usize, 10, 12, 14, 16, 22] {
        if cube[start] || seen[start] {
            continue;
        }
        bg_components += 1;
        if bg_components > 1 {
            return false;
        }
        seen[start] = true;
        stack.push(start);
        while let Some(p) = stack.pop() {
            for &q in &t.adj6_n18[p] {
                if !cube[q] && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    bg_components == 1
}

/// Whether toggling `voxel` preserves the topology of `mask` (26-connected
/// foreground, 6-connected background; voxels outside the grid are background).
pub fn is_simple_point(mask: &VoxelGrid<bool>, voxel: [usize; 3]) -> bool {
    let g = mask.geometry();
    let mut cube = [false; 27];
    for (p, c) in cube.iter_mut().enumerate() {
        if p == CENTER {
            continue;
        }
        let o = cube_offset(p);
        let (i, j, k) = (voxel[0] as i64 + o[0], voxel[1] as i64 + o[1], voxel[2] as i64 + o[2]);
        if g.contains(i, j, k) {
            *c = mask.data()[g.index(i as usize, j as usize, k as usize)];
        }
    }
    is_simple_configuration(&cube)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyCorrectionResult {
    pub corrected: ScalarField,
    pub modified_voxel_count: usize,
    pub seed: [usize; 3],
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    key: f64,
    index: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Min-heap on (key, index).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Unseen,
    Queued,
    Deferred,
    Accepted,
}

/// Raises field values where needed so that every sublevel set is a single
/// 26-connected component without handles or cavities.
pub fn topology_correct(sdf: &ScalarField) -> Result<TopologyCorrectionResult> {
    sdf.check_finite()?;
    let g = *sdf.geometry();
    let orig = sdf.data();
    let (seed, &min) = orig
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::Degenerate("empty field".into()))?;
    if min >= 0.0 {
        return Err(Error::Degenerate("field has no negative voxel".into()));
    }
    let eps = 1e-4 * g.max_spacing();

    let mut value = orig.to_vec();
    let mut state = vec![State::Unseen; g.len()];
    let mut accepted = VoxelGrid::filled(g, false);
    let mut heap = BinaryHeap::new();
    let offsets: Vec<[i64; 3]> = (0..27).filter(|&p| p != CENTER).map(cube_offset).collect();

    heap.push(Entry { key: min, index: seed });
    state[seed] = State::Queued;
    let mut level = f64::NEG_INFINITY;

    while let Some(Entry { key, index }) = heap.pop() {
        if state[index] != State::Queued {
            continue;
        }
        let [i, j, k] = g.coords(index);
        if index != seed && !is_simple_point(&accepted, [i, j, k]) {
            state[index] = State::Deferred;
            continue;
        }
        let v = key.max(level);
        value[index] = v;
        level = v;
        state[index] = State::Accepted;
        accepted.data_mut()[index] = true;

        for o in &offsets {
            let (ni, nj, nk) = (i as i64 + o[0], j as i64 + o[1], k as i64 + o[2]);
            if !g.contains(ni, nj, nk) {
                continue;
            }
            let n = g.index(ni as usize, nj as usize, nk as usize);
            let key = match state[n] {
                State::Unseen => orig[n],
                State::Deferred if orig[n] >= level => orig[n],
                State::Deferred => level + eps,
                State::Queued | State::Accepted => continue,
            };
            state[n] = State::Queued;
            heap.push(Entry { key, index: n });
        }
    }

    // Voxels that never became simple sit above every accepted level.
    for (idx, s) in state.iter().enumerate() {
        if *s != State::Accepted {
            value[idx] = orig[idx].max(level + eps);
        }
    }

    let modified_voxel_count = value
        .iter()
        .zip(orig)
        .filter(|(a, b)| a.to_bits() != b.to_bits())
        .count();
    Ok(TopologyCorrectionResult {
        corrected: VoxelGrid::from_vec(g, value)?,
        modified_voxel_count,
        seed: g.coords(seed),
    })
}
