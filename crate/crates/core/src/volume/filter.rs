use super::grid::{GridGeometry, ScalarField, VoxelGrid};
use crate::error::{Error, Result};

/// Normalised sampled Gaussian with radius `ceil(3 sigma / h)` taps.
pub fn gaussian_kernel(sigma: f64, h: f64) -> Vec<f64> {
    let radius = (3.0 * sigma / h).ceil() as usize;
    let mut k: Vec<f64> = (0..=2 * radius)
        .map(|t| {
            let x = (t as f64 - radius as f64) * h;
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= sum);
    k
}

/// Separable Gaussian blur of raw x-fastest samples with edge replication.
pub(crate) fn smooth_samples(geometry: &GridGeometry, data: &mut [f64], sigma: f64) {
    if sigma == 0.0 {
        return;
    }
    let [nx, ny, nz] = geometry.dims;
    let mut line = Vec::new();
    for axis in 0..3 {
        let n = geometry.dims[axis];
        if n == 1 {
            continue;
        }
        let kernel = gaussian_kernel(sigma, geometry.spacing[axis]);
        let radius = (kernel.len() / 2) as i64;
        let stride = [1, nx, nx * ny][axis];
        let (na, nb) = match axis {
            0 => (ny, nz),
            1 => (nx, nz),
            _ => (nx, ny),
        };
        line.resize(n, 0.0);
        for b in 0..nb {
            for a in 0..na {
                let start = match axis {
                    0 => geometry.index(0, a, b),
                    1 => geometry.index(a, 0, b),
                    _ => geometry.index(a, b, 0),
                };
                for (t, v) in line.iter_mut().enumerate() {
                    *v = data[start + t * stride];
                }
                for t in 0..n {
                    let mut acc = 0.0;
                    for (w_idx, w) in kernel.iter().enumerate() {
                        let src = (t as i64 + w_idx as i64 - radius).clamp(0, n as i64 - 1);
                        acc += w * line[src as usize];
                    }
                    data[start + t * stride] = acc;
                }
            }
        }
    }
}

/// Gaussian filter with standard deviation `sigma` in millimetres.
pub fn gaussian_smooth(field: &ScalarField, sigma: f64) -> Result<ScalarField> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Argument(format!("sigma must be a finite value >= 0, got {sigma}")));
    }
    let mut data = field.data().to_vec();
    smooth_samples(field.geometry(), &mut data, sigma);
    VoxelGrid::from_vec(*field.geometry(), data)
}
