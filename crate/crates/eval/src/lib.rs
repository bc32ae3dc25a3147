//! Synthetic scenes with exact ground truth, instance DICE scoring,
//! crossing-order accuracy and timing for the DLO pipeline.

pub mod bench;
pub mod bundle;
pub mod dice;
pub mod error;
pub mod evaluate;
pub mod generator;

pub use bench::{benchmark, TimingReport};
pub use dice::{dice, match_instances, DiceReport};
pub use error::{EvalError, Result};
pub use evaluate::{crossing_accuracy, evaluate, CrossingTally, TierSummary};
pub use generator::{generate_scene, tier_params, GtCrossing, SceneParams, SyntheticDlo, SyntheticScene, TIER_SIZE};

use dlo_core::imgproc::HsvFilterSpec;
use dlo_core::{run_pipeline, PipelineOptions, RgbImage, SceneInput, SceneResult};

/// HSV filter that keeps every generator color and drops the background.
pub fn scene_filter() -> HsvFilterSpec {
    HsvFilterSpec::saturated(0.5, 0.3)
}

/// Pipeline output for one image scored against its ground truth.
#[derive(Debug)]
pub struct SceneOutcome {
    pub result: dlo_core::Result<SceneResult>,
    pub dice: DiceReport,
    pub crossings: CrossingTally,
}

/// Runs the pipeline on `image` and scores it. A failed run scores zero for
/// every ground-truth instance.
pub fn run_and_score(
    image: &RgbImage,
    truth: &SyntheticScene,
    filter: &HsvFilterSpec,
    opts: PipelineOptions,
) -> Result<SceneOutcome> {
    let result = run_pipeline(SceneInput::Rgb { image, filter }, opts);
    let (dice, crossings) = match &result {
        Ok(r) => {
            let d = evaluate(&r.instances, truth)?;
            let c = crossing_accuracy(&r.crossings, &d, truth);
            (d, c)
        }
        Err(_) => {
            let d = evaluate(&[], truth)?;
            let c = crossing_accuracy(&[], &d, truth);
            (d, c)
        }
    };
    Ok(SceneOutcome {
        result,
        dice,
        crossings,
    })
}

/// Generates `count` scenes of a tier and pools their scores.
pub fn score_tier(
    tier: usize,
    count: usize,
    base_seed: u64,
    opts: PipelineOptions,
) -> Result<(TierSummary, Vec<SyntheticScene>)> {
    let filter = scene_filter();
    let mut scores = Vec::new();
    let mut tally = CrossingTally::default();
    let mut failures = 0;
    let mut scenes = Vec::with_capacity(count);
    for i in 0..count {
        let scene = generate_scene(&tier_params(tier, base_seed, i))?;
        let out = run_and_score(&scene.image, &scene, &filter, opts)?;
        failures += usize::from(out.result.is_err());
        scores.extend_from_slice(&out.dice.scores);
        tally.add(out.crossings);
        scenes.push(scene);
    }
    Ok((TierSummary::from_scores(count, failures, &scores, tally), scenes))
}
