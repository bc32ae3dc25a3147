//! Timing the pipeline over a set of images.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use dlo_core::imgproc::HsvFilterSpec;
use dlo_core::{run_pipeline, PipelineOptions, RgbImage, SceneInput, Stage, StageTimings};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimingReport {
    pub images: usize,
    pub repetitions: usize,
    /// Images the pipeline failed on; they are left out of the timings.
    pub failures: usize,
    /// Seconds per stage, summed over images.
    pub stages: BTreeMap<String, f64>,
    /// End-to-end seconds, summed over images.
    pub total_seconds: f64,
    pub fps: f64,
    pub mean_ms_per_image: f64,
}

impl TimingReport {
    pub fn stage_sum(&self) -> f64 {
        self.stages.values().sum()
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        for stage in Stage::ALL {
            let v = self.stages.get(stage.name()).copied().unwrap_or(0.0);
            s.push_str(&format!(
                "{:<14} {:>10.3} ms/img\n",
                stage.name(),
                1e3 * v / self.images.max(1) as f64
            ));
        }
        s.push_str(&format!(
            "{:<14} {:>10.3} ms/img  ({:.2} FPS, {} images, {} failed)\n",
            "end-to-end", self.mean_ms_per_image, self.fps, self.images, self.failures
        ));
        s
    }
}

/// Runs the pipeline once untimed on each image, then `repetitions` timed
/// runs. Per image, the run with the median end-to-end time supplies both the
/// total and the per-stage durations, so stage sums never exceed totals.
pub fn benchmark(
    images: &[RgbImage],
    filter: &HsvFilterSpec,
    repetitions: usize,
    opts: PipelineOptions,
) -> TimingReport {
    let reps = repetitions.max(1);
    let mut stages = [Duration::ZERO; 6];
    let mut total = Duration::ZERO;
    let mut failures = 0;
    for image in images {
        let input = SceneInput::Rgb { image, filter };
        if run_pipeline(input, opts).is_err() {
            failures += 1;
            continue;
        }
        let mut runs: Vec<(Duration, StageTimings)> = Vec::with_capacity(reps);
        for _ in 0..reps {
            let t0 = Instant::now();
            let r = run_pipeline(input, opts);
            let e2e = t0.elapsed();
            if let Ok(r) = r {
                runs.push((e2e, r.timings));
            }
        }
        runs.sort_by_key(|r| r.0);
        let (e2e, t) = runs[runs.len() / 2];
        total += e2e;
        for (acc, d) in stages.iter_mut().zip(t.durations) {
            *acc += d;
        }
    }
    let timed = images.len() - failures;
    let total_seconds = total.as_secs_f64();
    TimingReport {
        images: timed,
        repetitions: reps,
        failures,
        stages: Stage::ALL
            .iter()
            .map(|s| (s.name().to_string(), stages[*s as usize].as_secs_f64()))
            .collect(),
        total_seconds,
        fps: if total_seconds > 0.0 {
            timed as f64 / total_seconds
        } else {
            0.0
        },
        mean_ms_per_image: if timed > 0 {
            1e3 * total_seconds / timed as f64
        } else {
            0.0
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_scene, SceneParams};

    #[test]
    fn one_scene_report_shape() {
        let scene = generate_scene(&SceneParams::new(2, 1, 400, 300)).unwrap();
        let r = benchmark(&[scene.image], &crate::scene_filter(), 3, PipelineOptions::default());
        assert_eq!(r.stages.len(), 6);
        assert_eq!(r.images, 1);
        assert!(r.fps > 0.0);
        assert!(r.stage_sum() <= r.total_seconds);
        assert!(r.table().contains("end-to-end"));
    }
}
