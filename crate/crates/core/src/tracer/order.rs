//! Which strand lies on top at a crossing.
//!
//! An occluded strand is interrupted by the other's color, so its pixels
//! vary more. Sampling the blurred image along each strand, the one with the
//! lower summed per-channel standard deviation is taken as on top.

use serde::Serialize;

use crate::intersections::Intersection;
use crate::raster::{Px, RgbImage};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingRecord {
    pub intersection: usize,
    pub center: Px,
    /// Instance ids of the two strands, in strand order.
    pub strands: [usize; 2],
    /// Instance id lying above.
    pub top: usize,
    /// Position of the top strand within `strands`.
    pub top_strand: usize,
    pub scores: [f64; 2],
}

/// Pixels sampled for a strand: its patch pixels plus the arm extensions past
/// each of its generated ends.
pub fn strand_samples(inter: &Intersection, strand: usize) -> Vec<Px> {
    let t = &inter.through_paths[strand];
    let mut out = t.pixels.clone();
    for end in std::iter::once(t.from).chain(t.to) {
        out.extend_from_slice(&inter.arm_extensions[end]);
    }
    out
}

/// Sum over channels of the population standard deviation at `pixels`.
pub fn strand_score(image: &RgbImage, pixels: &[Px]) -> f64 {
    let pts: Vec<[u8; 3]> = pixels
        .iter()
        .filter(|p| image.dims().contains(**p))
        .map(|&p| image.get(p))
        .collect();
    if pts.is_empty() {
        return 0.0;
    }
    let n = pts.len() as f64;
    (0..3)
        .map(|c| {
            let mean = pts.iter().map(|v| f64::from(v[c])).sum::<f64>() / n;
            let var = pts.iter().map(|v| (f64::from(v[c]) - mean).powi(2)).sum::<f64>() / n;
            var.sqrt()
        })
        .sum()
}

/// Picks the top strand of a two-strand crossing; ties go to strand 0.
/// `owners` maps each strand to the instance that traversed it. Returns
/// `None` when the patch does not hold two strands.
pub fn determine_crossing_order(
    blurred: &RgbImage,
    inter: &Intersection,
    index: usize,
    owners: [usize; 2],
) -> Option<CrossingRecord> {
    if inter.through_paths.len() != 2 {
        return None;
    }
    let scores = [0, 1].map(|s| strand_score(blurred, &strand_samples(inter, s)));
    let top_strand = usize::from(scores[1] < scores[0]);
    Some(CrossingRecord {
        intersection: index,
        center: inter.center,
        strands: owners,
        top: owners[top_strand],
        top_strand,
        scores,
    })
}
