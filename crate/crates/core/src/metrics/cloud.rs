use rayon::prelude::*;

use super::kdtree::KdTree;
use crate::error::{Error, Result};
use crate::volume::SurfaceId;
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
    pub source: Option<SurfaceId>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Self {
        PointCloud { points, source: None }
    }

    pub fn with_source(mut self, source: SurfaceId) -> Self {
        self.source = Some(source);
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl From<Vec<Vec3>> for PointCloud {
    fn from(points: Vec<Vec3>) -> Self {
        PointCloud::new(points)
    }
}

fn nonempty(c: &PointCloud, what: &str) -> Result<()> {
    if c.is_empty() {
        Err(Error::Argument(format!("{what} point cloud is empty")))
    } else {
        Ok(())
    }
}

/// Squared nearest-neighbour distance from every query point into `reference`.
fn nn_sq(query: &PointCloud, reference: &PointCloud) -> Vec<(usize, f64)> {
    let tree = KdTree::new(&reference.points);
    query
        .points
        .par_iter()
        .map(|q| tree.nearest(q).expect("reference is nonempty"))
        .collect()
}

/// For every query point, the index of its nearest reference point (ties to
/// the smallest index) and the Euclidean distance to it.
pub fn nearest_neighbor_index(query: &PointCloud, reference: &PointCloud) -> Result<Vec<(usize, f64)>> {
    nonempty(reference, "reference")?;
    Ok(nn_sq(query, reference)
        .into_iter()
        .map(|(i, d2)| (i, d2.sqrt()))
        .collect())
}

/// Mean squared nearest-neighbour distance from `p` to `q` plus the same
/// from `q` to `p`.
pub fn chamfer(p: &PointCloud, q: &PointCloud) -> Result<f64> {
    nonempty(p, "first")?;
    nonempty(q, "second")?;
    let a: f64 = nn_sq(p, q).iter().map(|x| x.1).sum();
    let b: f64 = nn_sq(q, p).iter().map(|x| x.1).sum();
    Ok(a / p.len() as f64 + b / q.len() as f64)
}

/// Average symmetric surface distance: all nearest-neighbour distances of
/// both directions pooled and averaged.
pub fn assd(p: &PointCloud, q: &PointCloud) -> Result<f64> {
    nonempty(p, "first")?;
    nonempty(q, "second")?;
    let a: f64 = nn_sq(p, q).iter().map(|x| x.1.sqrt()).sum();
    let b: f64 = nn_sq(q, p).iter().map(|x| x.1.sqrt()).sum();
    Ok((a + b) / (p.len() + q.len()) as f64)
}

/// Nearest-rank percentile of a sample; `pct` in (0, 100].
pub(crate) fn percentile(mut values: Vec<f64>, pct: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let rank = ((pct / 100.0) * values.len() as f64).ceil().max(1.0) as usize;
    values[rank.min(values.len()) - 1]
}

/// Symmetric Hausdorff distance, or with `percentile < 100` the larger of
/// the two directed nearest-rank percentiles.
pub fn hausdorff(p: &PointCloud, q: &PointCloud, pct: f64) -> Result<f64> {
    if !(pct > 0.0 && pct <= 100.0) {
        return Err(Error::Argument(format!("percentile {pct} outside (0, 100]")));
    }
    nonempty(p, "first")?;
    nonempty(q, "second")?;
    let directed = |a: &PointCloud, b: &PointCloud| {
        let d: Vec<f64> = nn_sq(a, b).iter().map(|x| x.1.sqrt()).collect();
        if pct == 100.0 {
            d.into_iter().fold(0.0, f64::max)
        } else {
            percentile(d, pct)
        }
    };
    Ok(directed(p, q).max(directed(q, p)))
}
