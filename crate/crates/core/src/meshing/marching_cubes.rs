use std::collections::HashMap;
use std::sync::OnceLock;

use super::TriangleMesh;
use crate::error::{Error, Result};
use crate::volume::ScalarField;
use crate::Vec3;

// Corner c sits at (x, y, z) = CORNERS[c] within the cell.
const CORNERS: [[u8; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

const EDGES: [[u8; 2]; 12] = [
    [0, 1],
    [1, 2],
    [2, 3],
    [3, 0],
    [4, 5],
    [5, 6],
    [6, 7],
    [7, 4],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

// Corner cycles of the six cell faces with their outward normals.
const FACES: [([u8; 4], [i8; 3]); 6] = [
    ([0, 1, 2, 3], [0, 0, -1]),
    ([4, 5, 6, 7], [0, 0, 1]),
    ([0, 1, 5, 4], [0, -1, 0]),
    ([3, 2, 6, 7], [0, 1, 0]),
    ([0, 3, 7, 4], [-1, 0, 0]),
    ([1, 2, 6, 5], [1, 0, 0]),
];

// Smallest distance of an interpolated vertex from a cell corner, as a
// fraction of the edge; keeps triangles away from zero area.
const T_CLAMP: f64 = 1e-3;

type Table = Vec<Vec<[u8; 3]>>;

fn edge_between(a: u8, b: u8) -> u8 {
    EDGES
        .iter()
        .position(|e| (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a))
        .expect("corners share a cell edge") as u8
}

fn corner_pos(c: u8) -> Vec3 {
    let p = CORNERS[c as usize];
    Vec3::new(p[0] as f64, p[1] as f64, p[2] as f64)
}

fn edge_mid(e: u8) -> Vec3 {
    let [a, b] = EDGES[e as usize];
    (corner_pos(a) + corner_pos(b)) * 0.5
}

/// Directed iso-segments on the six faces of a cell. On a face with two
/// diagonal inside corners the inside corners are joined, so the inside
/// phase behaves 18/26-connected and the outside 6-connected.
fn face_segments(inside: u8) -> Vec<(u8, u8)> {
    let is_in = |c: u8| inside & (1 << c) != 0;
    let mut segs = Vec::new();
    for (cyc, normal) in FACES {
        let n = Vec3::new(normal[0] as f64, normal[1] as f64, normal[2] as f64);
        let crossing: Vec<u8> = (0..4)
            .filter(|&q| is_in(cyc[q]) != is_in(cyc[(q + 1) % 4]))
            .map(|q| edge_between(cyc[q], cyc[(q + 1) % 4]))
            .collect();
        // Each segment carries a corner on a known side of it.
        let mut raw = Vec::new();
        match crossing.len() {
            0 => {}
            2 => {
                let (a, b) = (edge_mid(crossing[0]), edge_mid(crossing[1]));
                let side = (b - a).cross(&n);
                let probe = cyc
                    .iter()
                    .copied()
                    .find(|&c| side.dot(&(corner_pos(c) - a)).abs() > 1e-9)
                    .expect("segment does not contain every face corner");
                raw.push((crossing[0], crossing[1], probe));
            }
            4 => {
                for q in 0..4 {
                    let c = cyc[q];
                    if !is_in(c) {
                        let prev = cyc[(q + 3) % 4];
                        let next = cyc[(q + 1) % 4];
                        raw.push((edge_between(prev, c), edge_between(c, next), c));
                    }
                }
            }
            _ => unreachable!("a face cycle crosses an even number of times"),
        }
        for (ea, eb, probe) in raw {
            let (a, b) = (edge_mid(ea), edge_mid(eb));
            let side = (b - a).cross(&n);
            let s = side.dot(&(corner_pos(probe) - a)) > 0.0;
            // Inside lies on the +side of (b - a) × n.
            segs.push(if s == is_in(probe) { (ea, eb) } else { (eb, ea) });
        }
    }
    segs
}

fn chain_loops(segs: &[(u8, u8)]) -> (Vec<Vec<u8>>, [Option<u8>; 12]) {
    let mut next = [None; 12];
    for &(a, b) in segs {
        assert!(next[a as usize].is_none(), "edge leaves twice");
        next[a as usize] = Some(b);
    }
    let mut seen = [false; 12];
    let mut loops = Vec::new();
    for start in 0..12u8 {
        if next[start as usize].is_none() || seen[start as usize] {
            continue;
        }
        let mut lp = Vec::new();
        let mut e = start;
        while !seen[e as usize] {
            seen[e as usize] = true;
            lp.push(e);
            e = next[e as usize].expect("loop closes");
        }
        assert_eq!(e, start, "segments chain into closed loops");
        loops.push(lp);
    }
    (loops, next)
}

/// Triangles for two inside corners at opposite ends of a cell diagonal:
/// a six-triangle tube joins the two corner caps so that the corners stay
/// 26-connected.
fn tube(inside: u8, next: &[Option<u8>; 12]) -> Vec<[u8; 3]> {
    let is_in = |c: u8| inside & (1 << c) != 0;
    let outside: Vec<u8> = (0..8).filter(|&c| !is_in(c)).collect();
    let neighbours = |c: u8| -> Vec<u8> {
        EDGES
            .iter()
            .filter_map(|e| {
                if e[0] == c {
                    Some(e[1])
                } else if e[1] == c {
                    Some(e[0])
                } else {
                    None
                }
            })
            .collect()
    };
    // Walk the hexagon of outside corners; each touches one crossing edge.
    let mut ring = Vec::with_capacity(6);
    let mut prev = u8::MAX;
    let mut cur = outside[0];
    for _ in 0..6 {
        let nb = neighbours(cur);
        let into = *nb.iter().find(|&&c| is_in(c)).expect("touches an inside corner");
        ring.push(edge_between(cur, into));
        let step = *nb
            .iter()
            .find(|&&c| !is_in(c) && c != prev)
            .expect("outside corners form a cycle");
        prev = cur;
        cur = step;
    }
    (0..6)
        .map(|t| {
            let (a, m, b) = (ring[t], ring[(t + 1) % 6], ring[(t + 2) % 6]);
            if next[a as usize] == Some(b) {
                [a, b, m]
            } else {
                assert_eq!(next[b as usize], Some(a));
                [b, a, m]
            }
        })
        .collect()
}

fn edge_faces(e: u8) -> [usize; 2] {
    let [a, b] = EDGES[e as usize];
    let mut out = [usize::MAX; 2];
    let mut n = 0;
    for (f, (cyc, _)) in FACES.iter().enumerate() {
        if cyc.contains(&a) && cyc.contains(&b) {
            out[n] = f;
            n += 1;
        }
    }
    out
}

/// Triangulates a loop of crossing edges. A chord between two loop vertices
/// on the same cell face could coincide with the neighbouring cell's chord,
/// so such chords are avoided; among the rest the shortest total chord
/// length wins.
fn triangulate_loop(lp: &[u8]) -> Vec<[u8; 3]> {
    let n = lp.len();
    let chord_cost = |i: usize, j: usize| -> (u32, f64) {
        if (i + 1) % n == j || (j + 1) % n == i {
            return (0, 0.0);
        }
        let (fa, fb) = (edge_faces(lp[i]), edge_faces(lp[j]));
        let shared = fa.iter().any(|f| fb.contains(f)) as u32;
        (shared, (edge_mid(lp[i]) - edge_mid(lp[j])).norm())
    };
    let add = |a: (u32, f64), b: (u32, f64)| (a.0 + b.0, a.1 + b.1);
    let better = |a: (u32, f64), b: (u32, f64)| a.0 < b.0 || (a.0 == b.0 && a.1 < b.1 - 1e-12);
    // cost[i][j]: best triangulation of the sub-polygon i..=j, split[i][j] its apex.
    let mut cost = vec![vec![(0u32, 0.0f64); n]; n];
    let mut split = vec![vec![0usize; n]; n];
    for len in 2..n {
        for i in 0..n - len {
            let j = i + len;
            let mut best = (u32::MAX, f64::INFINITY);
            for k in i + 1..j {
                let c = add(add(cost[i][k], cost[k][j]), add(chord_cost(i, k), chord_cost(k, j)));
                if best.0 == u32::MAX || better(c, best) {
                    best = c;
                    split[i][j] = k;
                }
            }
            cost[i][j] = best;
        }
    }
    let mut tris = Vec::with_capacity(n - 2);
    let mut stack = vec![(0, n - 1)];
    while let Some((i, j)) = stack.pop() {
        if j - i < 2 {
            continue;
        }
        let k = split[i][j];
        tris.push([lp[i], lp[k], lp[j]]);
        stack.push((i, k));
        stack.push((k, j));
    }
    tris
}

fn build_table() -> Table {
    let mut table: Table = (0..=255u8)
        .map(|inside| {
            let segs = face_segments(inside);
            let (loops, next) = chain_loops(&segs);
            let diagonal = matches!(inside, 0b0100_0001 | 0b1000_0010 | 0b0001_0100 | 0b0010_1000);
            if diagonal {
                return tube(inside, &next);
            }
            loops.iter().flat_map(|lp| triangulate_loop(lp)).collect()
        })
        .collect();
    // Make normals point from inside (low values) to outside: check the
    // single-corner case and flip every triangle if needed.
    let t = table[1][0];
    let (a, b, c) = (edge_mid(t[0]), edge_mid(t[1]), edge_mid(t[2]));
    if (b - a).cross(&(c - a)).dot(&(a - corner_pos(0))) < 0.0 {
        for tris in &mut table {
            for tri in tris.iter_mut() {
                tri.swap(1, 2);
            }
        }
    }
    table
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

/// Triangulates `{field = iso}`. Voxels with value below `iso` are inside;
/// faces are oriented towards increasing values. Vertices are welded by the
/// grid edge they lie on. Surfaces reaching the grid border stay open there.
pub fn marching_cubes(field: &ScalarField, iso: f64) -> Result<TriangleMesh> {
    if !iso.is_finite() {
        return Err(Error::Argument(format!("iso value {iso} is not finite")));
    }
    field.check_finite()?;
    let (lo, hi) = field.min_max();
    if !(lo < iso && iso < hi) {
        return Err(Error::EmptySurface(format!(
            "iso value {iso} outside the field range [{lo}, {hi}]"
        )));
    }
    let g = *field.geometry();
    let [nx, ny, nz] = g.dims;
    if nx < 2 || ny < 2 || nz < 2 {
        return Err(Error::EmptySurface("grid has no cells".into()));
    }
    let data = field.data();
    let table = table();
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut weld: HashMap<(usize, u8), u32> = HashMap::new();

    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let idx = |c: usize| {
                    let p = CORNERS[c];
                    g.index(i + p[0] as usize, j + p[1] as usize, k + p[2] as usize)
                };
                let mut values = [0.0; 8];
                let mut case = 0usize;
                for (c, v) in values.iter_mut().enumerate() {
                    *v = data[idx(c)];
                    if *v < iso {
                        case |= 1 << c;
                    }
                }
                let tris = &table[case];
                if tris.is_empty() {
                    continue;
                }
                let mut vid = |e: u8| -> u32 {
                    let [a, b] = EDGES[e as usize];
                    let (ia, ib) = (idx(a as usize), idx(b as usize));
                    // The edge's lower grid point and axis name it globally.
                    let (base, far) = if ia < ib { (ia, ib) } else { (ib, ia) };
                    let axis = (0..3)
                        .find(|&d| CORNERS[a as usize][d] != CORNERS[b as usize][d])
                        .unwrap() as u8;
                    *weld.entry((base, axis)).or_insert_with(|| {
                        let (va, vb) = (data[base], data[far]);
                        let t = ((iso - va) / (vb - va)).clamp(T_CLAMP, 1.0 - T_CLAMP);
                        let pa = g.world_of_index(base);
                        let pb = g.world_of_index(far);
                        vertices.push(pa + (pb - pa) * t);
                        (vertices.len() - 1) as u32
                    })
                };
                for tri in tris {
                    faces.push([vid(tri[0]), vid(tri[1]), vid(tri[2])]);
                }
            }
        }
    }
    TriangleMesh::new(vertices, faces)
}
