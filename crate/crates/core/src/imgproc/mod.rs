//! Image and mask primitives: color filtering, distance transform, blur,
//! derived pipeline parameters and raster file I/O.

mod blur;
mod color;
mod distance;
pub mod io;
mod params;

pub use blur::{gaussian_blur, gaussian_taps, BLUR_RADIUS, BLUR_SIGMA};
pub use color::{color_filter, Hsv, HsvBand, HsvFilterSpec};
pub use distance::{distance_transform, DistanceMap};
pub use params::{compute_params, PipelineParams};
