//! Voxel grids, label maps, masks, distance transforms, filtering and sampling.

mod components;
mod distance;
mod filter;
mod grid;
pub mod io;
mod labels;
mod sample;

pub use components::{label_components, largest_component, Connectivity};
pub use distance::{signed_distance, squared_distance_to};
pub use filter::{gaussian_kernel, gaussian_smooth};
pub(crate) use filter::smooth_samples;
pub use grid::{GridGeometry, ScalarField, VoxelGrid};
pub use io::{load_label_volume, save_label_volume};
pub use labels::{build_mask, label, BinaryMask, Hemisphere, LabelVolume, SurfaceId, MAX_LABEL};
pub use sample::{trilinear_sample, Lerp};
