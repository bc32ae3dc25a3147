//! Instance masks from centerlines and the distance map.

use crate::imgproc::DistanceMap;
use crate::raster::{stamp_disk, BinaryMask, Dims};

use super::CenterlinePath;

/// Smallest radius a centerline pixel is drawn with.
pub const MIN_RADIUS: f64 = 1.0;
/// Subtracted from distance samples before drawing. The distance to the
/// nearest background pixel center overstates the stroke half-width by
/// about half a pixel.
pub const RADIUS_BIAS: f64 = 0.5;
/// Window of the median filter applied along the path.
pub const MEDIAN_WINDOW: usize = 5;

/// Running median with a centered window, shrunk at the path ends.
pub fn median_filter(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let mut buf = Vec::with_capacity(window);
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            buf.clear();
            buf.extend_from_slice(&values[lo..hi]);
            buf.sort_by(f64::total_cmp);
            let m = buf.len();
            if m % 2 == 1 {
                buf[m / 2]
            } else {
                0.5 * (buf[m / 2 - 1] + buf[m / 2])
            }
        })
        .collect()
}

/// Radius per centerline pixel: the distance value there, median filtered
/// along the path, less [`RADIUS_BIAS`], at least [`MIN_RADIUS`].
pub fn sample_radii(path: &CenterlinePath, dist: &DistanceMap) -> Vec<f64> {
    let raw: Vec<f64> = path.pixels.iter().map(|&p| dist.get(p)).collect();
    median_filter(&raw, MEDIAN_WINDOW)
        .into_iter()
        .map(|r| (r - RADIUS_BIAS).max(MIN_RADIUS))
        .collect()
}

/// Union of disks along a centerline, clipped to `dims`.
pub fn render_instance(path: &CenterlinePath, dims: Dims) -> BinaryMask {
    let mut mask = BinaryMask::new(dims.width, dims.height);
    for (i, &p) in path.pixels.iter().enumerate() {
        let r = path.radii.get(i).copied().unwrap_or(MIN_RADIUS).max(MIN_RADIUS);
        stamp_disk(&mut mask, p, r);
    }
    mask
}

#[derive(Clone, Debug, PartialEq)]
pub struct DloInstance {
    pub id: usize,
    pub centerline: CenterlinePath,
    pub mask: BinaryMask,
    /// Indices into the scene's crossing records that involve this instance.
    pub crossings: Vec<usize>,
}

/// Samples radii and renders one instance per path, ids in path order.
pub fn render_masks(paths: Vec<CenterlinePath>, dist: &DistanceMap) -> Vec<DloInstance> {
    paths
        .into_iter()
        .enumerate()
        .map(|(id, mut centerline)| {
            centerline.radii = sample_radii(&centerline, dist);
            let mask = render_instance(&centerline, dist.dims());
            DloInstance {
                id,
                centerline,
                mask,
                crossings: Vec::new(),
            }
        })
        .collect()
}
