use serde::Serialize;

use crate::error::{Error, Result};
use crate::imgproc::DistanceMap;

/// Length bounds derived from the widest DLO in the scene.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PipelineParams {
    /// Split-end prune length bound, in walked pixels.
    pub delta: u32,
    /// Y-branch match distance limit, in pixels.
    pub epsilon: u32,
    pub max_distance: f64,
}

/// `delta = ceil(2 max D)`, `epsilon = ceil(10 max D)`.
pub fn compute_params(dist: &DistanceMap) -> Result<PipelineParams> {
    let max = dist.max();
    if max <= 0.0 {
        return Err(Error::EmptyScene);
    }
    // absorbs float noise so that e.g. 2 * 4.0 stays 8
    let up = |v: f64| (v - 1e-9).ceil().max(1.0) as u32;
    Ok(PipelineParams {
        delta: up(2.0 * max),
        epsilon: up(10.0 * max),
        max_distance: max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgproc::distance_transform;
    use crate::raster::{BinaryMask, Px};

    fn params_for_max(max: f64) -> (u32, u32) {
        let d = DistanceMap::from_values(2, 1, vec![0.0, max]).unwrap();
        let p = compute_params(&d).unwrap();
        (p.delta, p.epsilon)
    }

    #[test]
    fn direct_formula() {
        assert_eq!(params_for_max(4.0), (8, 40));
        assert_eq!(params_for_max(1.0), (2, 10));
        assert_eq!(params_for_max(2.83), (6, 29));
    }

    #[test]
    fn from_distance_map() {
        // 9x9 block inside a 13x13 image has max distance 5
        let mut m = BinaryMask::new(13, 13);
        for y in 2..11 {
            for x in 2..11 {
                m.set(Px::new(x, y), true);
            }
        }
        let p = compute_params(&distance_transform(&m)).unwrap();
        assert_eq!(p.max_distance, 5.0);
        assert_eq!((p.delta, p.epsilon), (10, 50));

        let mut single = BinaryMask::new(5, 5);
        single.set(Px::new(2, 2), true);
        let p = compute_params(&distance_transform(&single)).unwrap();
        assert_eq!((p.delta, p.epsilon), (2, 10));
    }

    #[test]
    fn empty_scene_error() {
        let d = distance_transform(&BinaryMask::new(4, 4));
        assert!(matches!(compute_params(&d), Err(Error::EmptyScene)));
    }
}
