use serde::{Deserialize, Serialize};

/// Collision summary between two surfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub pair: [String; 2],
    /// Faces of the first mesh that hit the second mesh.
    pub faces_a: usize,
    pub faces_b: usize,
    pub percent_a: f64,
    pub percent_b: f64,
    /// Intersecting face pairs, one contact segment each.
    pub contacts: usize,
    #[serde(skip)]
    pub face_ids_a: Vec<u32>,
    #[serde(skip)]
    pub face_ids_b: Vec<u32>,
}

impl IntersectionReport {
    pub fn is_clear(&self) -> bool {
        self.contacts == 0
    }

    pub(crate) fn from_hits(
        pair: [String; 2],
        face_count_a: usize,
        face_count_b: usize,
        hits: &[(u32, u32)],
    ) -> Self {
        let mut ids_a: Vec<u32> = hits.iter().map(|h| h.0).collect();
        let mut ids_b: Vec<u32> = hits.iter().map(|h| h.1).collect();
        ids_a.sort_unstable();
        ids_a.dedup();
        ids_b.sort_unstable();
        ids_b.dedup();
        let pct = |n: usize, of: usize| if of == 0 { 0.0 } else { 100.0 * n as f64 / of as f64 };
        IntersectionReport {
            pair,
            faces_a: ids_a.len(),
            faces_b: ids_b.len(),
            percent_a: pct(ids_a.len(), face_count_a),
            percent_b: pct(ids_b.len(), face_count_b),
            contacts: hits.len(),
            face_ids_a: ids_a,
            face_ids_b: ids_b,
        }
    }
}
