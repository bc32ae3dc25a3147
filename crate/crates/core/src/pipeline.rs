//! The full per-image pipeline with per-stage timing.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result, Stage};
use crate::imgproc::{
    color_filter, compute_params, distance_transform, gaussian_blur, DistanceMap, HsvFilterSpec, PipelineParams,
};
use crate::intersections::{repair_intersections, Repair};
use crate::keypoints::{classify, prune_split_ends, KeypointSet};
use crate::raster::{BinaryMask, RgbImage};
use crate::skeleton::{thin, SkeletonMask};
use crate::tracer::{determine_crossing_order, render_masks, trace_all, CrossingRecord, DloInstance, TraceOptions};

/// What the pipeline segments.
#[derive(Clone, Copy, Debug)]
pub enum SceneInput<'a> {
    /// Color image segmented with an HSV filter.
    Rgb {
        image: &'a RgbImage,
        filter: &'a HsvFilterSpec,
    },
    /// Precomputed mask; the image, when given, is used for crossing order.
    Mask {
        mask: &'a BinaryMask,
        image: Option<&'a RgbImage>,
    },
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PipelineOptions {
    pub trace: TraceOptions,
}

/// Wall-clock duration of each stage.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimings {
    pub durations: [Duration; 6],
}

impl StageTimings {
    pub fn get(&self, stage: Stage) -> Duration {
        self.durations[stage as usize]
    }

    pub fn total(&self) -> Duration {
        self.durations.iter().sum()
    }
}

impl Serialize for StageTimings {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(6))?;
        for stage in Stage::ALL {
            m.serialize_entry(stage.name(), &self.get(stage).as_secs_f64())?;
        }
        m.end()
    }
}

/// Everything the pipeline produced for one image.
#[derive(Clone, Debug)]
pub struct SceneResult {
    pub width: usize,
    pub height: usize,
    pub mask: BinaryMask,
    pub distance: DistanceMap,
    pub params: PipelineParams,
    /// Keypoints after pruning, before crossings are rewired.
    pub keypoints: KeypointSet,
    pub pruned_skeleton: SkeletonMask,
    pub repair: Repair,
    pub instances: Vec<DloInstance>,
    pub crossings: Vec<CrossingRecord>,
    pub timings: StageTimings,
}

fn timed<T>(timings: &mut StageTimings, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t0 = Instant::now();
    let out = f().map_err(|e| e.in_stage(stage));
    timings.durations[stage as usize] = t0.elapsed();
    out
}

pub fn run_pipeline(input: SceneInput<'_>, opts: PipelineOptions) -> Result<SceneResult> {
    let mut timings = StageTimings::default();

    let (mask, image) = timed(&mut timings, Stage::Segmentation, || {
        let (mask, image) = match input {
            SceneInput::Rgb { image, filter } => (color_filter(image, filter), Some(image)),
            SceneInput::Mask { mask, image } => {
                if let Some(img) = image {
                    if img.dims() != mask.dims() {
                        return Err(Error::DimensionMismatch {
                            expected: (mask.width(), mask.height()),
                            found: (img.width(), img.height()),
                        });
                    }
                }
                (mask.clone(), image)
            }
        };
        if mask.is_empty() {
            return Err(Error::EmptyScene);
        }
        Ok((mask, image))
    })?;

    let (distance, params, skeleton) = timed(&mut timings, Stage::Thinning, || {
        let distance = distance_transform(&mask);
        let params = compute_params(&distance)?;
        Ok((distance, params, thin(&mask)))
    })?;

    let (keypoints, pruned_skeleton) = timed(&mut timings, Stage::Keypoints, || {
        let mut sk = skeleton;
        let kp = classify(&mut sk);
        Ok(prune_split_ends(kp, sk, params.delta))
    })?;

    let repair = timed(&mut timings, Stage::Intersections, || {
        repair_intersections(
            &keypoints,
            pruned_skeleton.clone(),
            &distance,
            f64::from(params.epsilon),
        )
    })?;

    let (paths, crossings) = timed(&mut timings, Stage::Tracing, || {
        let paths = trace_all(&repair, opts.trace)?;
        let mut owner = HashMap::new();
        for (id, p) in paths.iter().enumerate() {
            for ps in &p.passages {
                owner.insert((ps.intersection, ps.strand), id);
            }
        }
        let mut crossings = Vec::new();
        if let Some(img) = image {
            let blurred = gaussian_blur(img);
            for (i, inter) in repair.intersections.iter().enumerate() {
                let (Some(&a), Some(&b)) = (owner.get(&(i, 0)), owner.get(&(i, 1))) else {
                    continue;
                };
                crossings.extend(determine_crossing_order(&blurred, inter, i, [a, b]));
            }
        }
        Ok((paths, crossings))
    })?;

    let instances = timed(&mut timings, Stage::Rendering, || {
        let mut inst = render_masks(paths, &distance);
        for (k, c) in crossings.iter().enumerate() {
            inst[c.strands[0]].crossings.push(k);
            if c.strands[1] != c.strands[0] {
                inst[c.strands[1]].crossings.push(k);
            }
        }
        Ok(inst)
    })?;

    Ok(SceneResult {
        width: mask.width(),
        height: mask.height(),
        mask,
        distance,
        params,
        keypoints,
        pruned_skeleton,
        repair,
        instances,
        crossings,
        timings,
    })
}
