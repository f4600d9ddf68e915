use crate::meshing::TriangleMesh;
use crate::Vec3;

pub const LEAF_SIZE: usize = 4;
// Boxes are grown by this much (mm) so touching triangles are never culled.
const PAD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, other: &Aabb) {
        self.min = self.min.inf(&other.min);
        self.max = self.max.sup(&other.max);
    }

    pub fn overlaps(&self, o: &Aabb) -> bool {
        (0..3).all(|d| self.min[d] <= o.max[d] && o.min[d] <= self.max[d])
    }

    pub fn contains(&self, o: &Aabb) -> bool {
        (0..3).all(|d| self.min[d] <= o.min[d] && o.max[d] <= self.max[d])
    }
}

#[derive(Debug, Clone)]
pub struct BvhNode {
    pub bounds: Aabb,
    /// Children for inner nodes, `None` for leaves.
    pub children: Option<(usize, usize)>,
    /// Range into `Bvh::faces` covered by this node.
    pub start: usize,
    pub end: usize,
}

/// Axis-aligned bounding-box tree over the faces of one mesh.
#[derive(Debug, Clone)]
pub struct Bvh {
    pub nodes: Vec<BvhNode>,
    /// Face ids, permuted so that every node covers a contiguous range.
    pub faces: Vec<u32>,
    pub face_boxes: Vec<Aabb>,
}

impl Bvh {
    pub fn build(mesh: &TriangleMesh) -> Self {
        let face_boxes: Vec<Aabb> = (0..mesh.faces.len())
            .map(|f| {
                let [a, b, c] = mesh.triangle(f);
                Aabb {
                    min: a.inf(&b).inf(&c) - Vec3::repeat(PAD),
                    max: a.sup(&b).sup(&c) + Vec3::repeat(PAD),
                }
            })
            .collect();
        let mut bvh = Bvh {
            nodes: Vec::new(),
            faces: (0..mesh.faces.len() as u32).collect(),
            face_boxes,
        };
        if !bvh.faces.is_empty() {
            bvh.split(0, bvh.faces.len());
        }
        bvh
    }

    fn split(&mut self, start: usize, end: usize) -> usize {
        let mut bounds = Aabb::empty();
        let mut cmin = Vec3::repeat(f64::INFINITY);
        let mut cmax = Vec3::repeat(f64::NEG_INFINITY);
        for &f in &self.faces[start..end] {
            let b = &self.face_boxes[f as usize];
            bounds.grow(b);
            let c = (b.min + b.max) * 0.5;
            cmin = cmin.inf(&c);
            cmax = cmax.sup(&c);
        }
        let id = self.nodes.len();
        self.nodes.push(BvhNode {
            bounds,
            children: None,
            start,
            end,
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let axis = (cmax - cmin).imax();
        let mid = (end - start) / 2;
        let boxes = &self.face_boxes;
        let centre = |f: u32| boxes[f as usize].min[axis] + boxes[f as usize].max[axis];
        self.faces[start..end].select_nth_unstable_by(mid, |&a, &b| centre(a).total_cmp(&centre(b)).then(a.cmp(&b)));
        let left = self.split(start, start + mid);
        let right = self.split(start + mid, end);
        self.nodes[id].children = Some((left, right));
        id
    }

    /// Face pairs `(i, j)` with `i < j` whose boxes overlap, sorted.
    pub fn self_candidates(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            self.pairs(self, 0, 0, true, &mut out);
        }
        out.sort_unstable();
        out
    }

    /// Face pairs `(face of self, face of other)` whose boxes overlap, sorted.
    pub fn candidates_with(&self, other: &Bvh) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() && !other.nodes.is_empty() {
            self.pairs(other, 0, 0, false, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn pairs(&self, other: &Bvh, a: usize, b: usize, same: bool, out: &mut Vec<(u32, u32)>) {
        let (na, nb) = (&self.nodes[a], &other.nodes[b]);
        if !na.bounds.overlaps(&nb.bounds) {
            return;
        }
        if same && a == b {
            match na.children {
                Some((l, r)) => {
                    self.pairs(other, l, l, true, out);
                    self.pairs(other, r, r, true, out);
                    self.pairs(other, l, r, true, out);
                }
                None => {
                    let fs = &self.faces[na.start..na.end];
                    for (k, &fi) in fs.iter().enumerate() {
                        for &fj in &fs[k + 1..] {
                            if self.face_boxes[fi as usize].overlaps(&self.face_boxes[fj as usize]) {
                                out.push((fi.min(fj), fi.max(fj)));
                            }
                        }
                    }
                }
            }
            return;
        }
        match (na.children, nb.children) {
            (None, None) => {
                for &fi in &self.faces[na.start..na.end] {
                    for &fj in &other.faces[nb.start..nb.end] {
                        if self.face_boxes[fi as usize].overlaps(&other.face_boxes[fj as usize]) {
                            out.push(if same { (fi.min(fj), fi.max(fj)) } else { (fi, fj) });
                        }
                    }
                }
            }
            (Some((l, r)), None) => {
                self.pairs(other, l, b, same, out);
                self.pairs(other, r, b, same, out);
            }
            (None, Some((l, r))) => {
                self.pairs(other, a, l, same, out);
                self.pairs(other, a, r, same, out);
            }
            (Some((al, ar)), Some((bl, br))) => {
                // Descend the larger box first.
                let ext = |n: &BvhNode| (n.bounds.max - n.bounds.min).norm_squared();
                if ext(na) >= ext(nb) {
                    self.pairs(other, al, b, same, out);
                    self.pairs(other, ar, b, same, out);
                } else {
                    self.pairs(other, a, bl, same, out);
                    self.pairs(other, a, br, same, out);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshing::primitives::icosphere;

    #[test]
    fn covers_every_face_once_with_nested_boxes() {
        let m = icosphere(3);
        let bvh = Bvh::build(&m);
        let mut seen = bvh.faces.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..m.face_count() as u32).collect::<Vec<_>>());
        for n in &bvh.nodes {
            for &f in &bvh.faces[n.start..n.end] {
                assert!(n.bounds.contains(&bvh.face_boxes[f as usize]));
            }
            match n.children {
                Some((l, r)) => {
                    assert!(n.bounds.contains(&bvh.nodes[l].bounds));
                    assert!(n.bounds.contains(&bvh.nodes[r].bounds));
                    assert_eq!((bvh.nodes[l].start, bvh.nodes[r].end), (n.start, n.end));
                    assert_eq!(bvh.nodes[l].end, bvh.nodes[r].start);
                }
                None => assert!(n.end - n.start <= LEAF_SIZE),
            }
        }
    }

    #[test]
    fn candidates_match_all_pairs_box_test() {
        let m = icosphere(2);
        let bvh = Bvh::build(&m);
        let mut brute = Vec::new();
        for i in 0..m.face_count() as u32 {
            for j in i + 1..m.face_count() as u32 {
                if bvh.face_boxes[i as usize].overlaps(&bvh.face_boxes[j as usize]) {
                    brute.push((i, j));
                }
            }
        }
        assert_eq!(bvh.self_candidates(), brute);

        let other = Bvh::build(&icosphere(1).translated(Vec3::new(0.9, 0.2, 0.0)));
        let mut brute = Vec::new();
        for i in 0..bvh.faces.len() as u32 {
            for j in 0..other.faces.len() as u32 {
                if bvh.face_boxes[i as usize].overlaps(&other.face_boxes[j as usize]) {
                    brute.push((i, j));
                }
            }
        }
        assert_eq!(bvh.candidates_with(&other), brute);
    }
}
