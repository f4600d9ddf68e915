use crate::error::{Error, Result};
use crate::Vec3;

/// Plane-side tolerance in millimetres, applied with unit normals.
pub const PLANE_EPS: f64 = 1e-10;
/// Triangles with area at or below this (mm²) are degenerate.
pub const MIN_AREA: f64 = 1e-12;

pub type Triangle = [Vec3; 3];

/// Intersection of two triangles: a segment, possibly of zero length when
/// they only touch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec3,
    pub b: Vec3,
}

pub(crate) fn unit_normal(t: &Triangle) -> Option<Vec3> {
    let c = (t[1] - t[0]).cross(&(t[2] - t[0]));
    if 0.5 * c.norm() <= MIN_AREA {
        None
    } else {
        Some(c.normalize())
    }
}

/// Intersection segment of two triangles, `None` if they are disjoint.
/// Coplanar triangles intersect when their overlap has positive area.
pub fn tri_tri_intersect(t1: &Triangle, t2: &Triangle) -> Result<Option<Segment>> {
    let n1 = unit_normal(t1).ok_or_else(|| Error::Argument("first triangle is degenerate".into()))?;
    let n2 = unit_normal(t2).ok_or_else(|| Error::Argument("second triangle is degenerate".into()))?;
    Ok(intersect_with_normals(t1, &n1, t2, &n2))
}

fn side_distances(t: &Triangle, n: &Vec3, p: &Vec3) -> [f64; 3] {
    t.map(|v| {
        let s = n.dot(&(v - p));
        if s.abs() < PLANE_EPS {
            0.0
        } else {
            s
        }
    })
}

/// Points where triangle `t` meets the plane its signed distances `s` refer to.
fn plane_crossing(t: &Triangle, s: &[f64; 3]) -> Vec<Vec3> {
    let mut pts = Vec::with_capacity(3);
    for i in 0..3 {
        let j = (i + 1) % 3;
        if s[i] == 0.0 {
            pts.push(t[i]);
        }
        if s[i] * s[j] < 0.0 {
            pts.push(t[i] + (t[j] - t[i]) * (s[i] / (s[i] - s[j])));
        }
    }
    pts
}

pub(crate) fn intersect_with_normals(t1: &Triangle, n1: &Vec3, t2: &Triangle, n2: &Vec3) -> Option<Segment> {
    let s2 = side_distances(t2, n1, &t1[0]);
    if s2.iter().all(|&s| s > 0.0) || s2.iter().all(|&s| s < 0.0) {
        return None;
    }
    if s2.iter().all(|&s| s == 0.0) {
        return coplanar(t1, n1, t2);
    }
    let s1 = side_distances(t1, n2, &t2[0]);
    if s1.iter().all(|&s| s > 0.0) || s1.iter().all(|&s| s < 0.0) {
        return None;
    }
    if s1.iter().all(|&s| s == 0.0) {
        return coplanar(t1, n1, t2);
    }
    let dir = n1.cross(n2);
    let span = |pts: &[Vec3]| -> Option<((f64, Vec3), (f64, Vec3))> {
        let mut it = pts.iter().map(|p| (dir.dot(p), *p));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| {
            (if x.0 < lo.0 { x } else { lo }, if x.0 > hi.0 { x } else { hi })
        }))
    };
    let (lo1, hi1) = span(&plane_crossing(t1, &s1))?;
    let (lo2, hi2) = span(&plane_crossing(t2, &s2))?;
    let lo = if lo1.0 >= lo2.0 { lo1 } else { lo2 };
    let hi = if hi1.0 <= hi2.0 { hi1 } else { hi2 };
    (lo.0 <= hi.0).then_some(Segment { a: lo.1, b: hi.1 })
}

fn coplanar(t1: &Triangle, n: &Vec3, t2: &Triangle) -> Option<Segment> {
    // Drop the dominant normal axis and clip t2 against t1 in 2D.
    let ax = n.abs().imax();
    let (u, v) = ((ax + 1) % 3, (ax + 2) % 3);
    let to2 = |p: &Vec3| [p[u], p[v]];
    let mut a: Vec<[f64; 2]> = t1.iter().map(to2).collect();
    let cross2 = |o: [f64; 2], p: [f64; 2], q: [f64; 2]| (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
    if cross2(a[0], a[1], a[2]) < 0.0 {
        a.reverse();
    }
    let mut poly: Vec<Vec3> = t2.to_vec();
    for i in 0..3 {
        let (e0, e1) = (a[i], a[(i + 1) % 3]);
        let inside = |p: &Vec3| cross2(e0, e1, to2(p));
        let mut out = Vec::with_capacity(poly.len() + 1);
        for k in 0..poly.len() {
            let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
            let (sp, sq) = (inside(&p), inside(&q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                out.push(p + (q - p) * (sp / (sp - sq)));
            }
        }
        poly = out;
        if poly.is_empty() {
            return None;
        }
    }
    // Overlap area from the clipped polygon.
    let area: f64 = (1..poly.len().saturating_sub(1))
        .map(|k| (poly[k] - poly[0]).cross(&(poly[k + 1] - poly[0])).norm() * 0.5)
        .sum();
    (area > MIN_AREA).then(|| Segment { a: poly[0], b: poly[1] })
}
