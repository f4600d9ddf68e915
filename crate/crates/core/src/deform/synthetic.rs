//! Velocity fields with known structure, used as stand-ins for predicted ones.

use std::f64::consts::TAU;

use nalgebra::Matrix3;
use rand::Rng;

use super::VelocityField;
use crate::volume::GridGeometry;
use crate::Vec3;

/// Largest number of sinusoid terms in [`band_limited`].
pub const MAX_TERMS: usize = 8;

fn build(g: GridGeometry, f: impl Fn(Vec3) -> Vec3 + Sync) -> VelocityField {
    VelocityField::from_world_fn(g, f).expect("generated fields are finite")
}

pub fn constant(g: GridGeometry, c: Vec3) -> VelocityField {
    build(g, move |_| c)
}

/// `v(x) = A (x − centre)`.
pub fn linear(g: GridGeometry, a: Matrix3<f64>, centre: Vec3) -> VelocityField {
    build(g, move |x| a * (x - centre))
}

/// `v(x) = ω × (x − centre)`; its time-1 flow rotates by `|ω|` about `ω`.
pub fn rotation(g: GridGeometry, omega: Vec3, centre: Vec3) -> VelocityField {
    build(g, move |x| omega.cross(&(x - centre)))
}

/// `v(x) = ln(s) (x − centre)`; its time-1 flow scales by `s` about `centre`.
pub fn scaling(g: GridGeometry, s: f64, centre: Vec3) -> VelocityField {
    let k = s.ln();
    build(g, move |x| (x - centre) * k)
}

/// Radial push `a · r̂ · exp(−r² / 2w²)`, zero at the centre.
pub fn radial(g: GridGeometry, centre: Vec3, amplitude: f64, width: f64) -> VelocityField {
    build(g, move |x| {
        let d = x - centre;
        let r2 = d.norm_squared();
        d * (amplitude / width * (-r2 / (2.0 * width * width)).exp())
    })
}

/// Sum of `terms` (clamped to `1..=MAX_TERMS`) separable sinusoids with one
/// period across the grid along each axis and random phases and directions,
/// scaled so that the largest voxel norm equals `amplitude` mm.
pub fn band_limited(g: GridGeometry, rng: &mut impl Rng, amplitude: f64, terms: usize) -> VelocityField {
    let (lo, hi) = g.bounds();
    let extent = (hi - lo).map(|e| e.max(1e-9));
    let waves: Vec<(Vec3, [f64; 3])> = (0..terms.clamp(1, MAX_TERMS))
        .map(|_| {
            let dir = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let phase = [0, 1, 2].map(|_| rng.gen_range(0.0..TAU));
            (dir, phase)
        })
        .collect();
    let raw = build(g, |x| {
        let t = x - lo;
        waves.iter().fold(Vec3::zeros(), |acc, (dir, p)| {
            let s: f64 = (0..3).map(|a| (TAU * t[a] / extent[a] + p[a]).sin()).product();
            acc + dir * s
        })
    });
    let m = raw.max_norm();
    if m == 0.0 {
        raw
    } else {
        raw.scaled(amplitude / m)
    }
}
