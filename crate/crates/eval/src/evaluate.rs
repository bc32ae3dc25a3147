//! Scoring pipeline output against generator ground truth.

use serde::Serialize;

use dlo_core::tracer::{CrossingRecord, DloInstance};
use dlo_core::BinaryMask;

use crate::dice::{match_instances, mean_std, DiceReport};
use crate::error::Result;
use crate::generator::SyntheticScene;

/// Instance DICE after greedy matching.
pub fn evaluate(predictions: &[DloInstance], truth: &SyntheticScene) -> Result<DiceReport> {
    let pred: Vec<&BinaryMask> = predictions.iter().map(|p| &p.mask).collect();
    let gt: Vec<&BinaryMask> = truth.dlos.iter().map(|d| &d.mask).collect();
    match_instances(&pred, &gt)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrossingTally {
    /// Ground-truth crossings between two different DLOs.
    pub total: usize,
    /// Of those, how many a predicted crossing was matched to.
    pub found: usize,
    /// Matched crossings whose predicted top is the DLO drawn last.
    pub correct: usize,
}

impl CrossingTally {
    pub fn add(&mut self, o: CrossingTally) {
        self.total += o.total;
        self.found += o.found;
        self.correct += o.correct;
    }

    /// Correct over all ground-truth crossings; missed ones count as wrong.
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

/// Matches each ground-truth crossing between two DLOs to the nearest
/// predicted crossing whose instances map onto the same pair, and checks
/// the predicted top. Self-crossings are skipped: both strands have one
/// color, so there is nothing to tell them apart by.
pub fn crossing_accuracy(crossings: &[CrossingRecord], dice: &DiceReport, truth: &SyntheticScene) -> CrossingTally {
    let to_truth = |pred: usize| dice.matches.iter().find(|m| m.0 == pred).map(|m| m.1);
    let mut tally = CrossingTally::default();
    let mut taken = vec![false; crossings.len()];
    for gt in truth.crossings.iter().filter(|c| !c.is_self()) {
        tally.total += 1;
        let tol = 2.0 * (truth.dlos[gt.lower].radius + truth.dlos[gt.upper].radius);
        let best = crossings
            .iter()
            .enumerate()
            .filter(|(k, _)| !taken[*k])
            .filter_map(|(k, c)| {
                let (a, b) = (to_truth(c.strands[0])?, to_truth(c.strands[1])?);
                let same_pair = (a, b) == (gt.lower, gt.upper) || (b, a) == (gt.lower, gt.upper);
                let d = (f64::from(c.center.x) - gt.point[0]).hypot(f64::from(c.center.y) - gt.point[1]);
                (same_pair && d <= tol).then_some((d, k))
            })
            .min_by(|x, y| x.0.total_cmp(&y.0));
        if let Some((_, k)) = best {
            taken[k] = true;
            tally.found += 1;
            if to_truth(crossings[k].top) == Some(gt.upper) {
                tally.correct += 1;
            }
        }
    }
    tally
}

/// Per-instance scores pooled over many scenes.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TierSummary {
    pub scenes: usize,
    pub failures: usize,
    pub instances: usize,
    pub mean_dice: f64,
    pub std_dice: f64,
    pub crossings: CrossingTally,
}

impl TierSummary {
    /// Pools `scores` (one per instance, zeros for misses) across scenes.
    pub fn from_scores(scenes: usize, failures: usize, scores: &[f64], crossings: CrossingTally) -> Self {
        let (mean_dice, std_dice) = mean_std(scores);
        Self {
            scenes,
            failures,
            instances: scores.len(),
            mean_dice,
            std_dice,
            crossings,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_scene, SceneParams};
    use dlo_core::tracer::{render_instance, CenterlinePath};

    #[test]
    fn ground_truth_centerlines_render_their_masks() {
        for seed in 0..6 {
            let scene = generate_scene(&SceneParams::new(40 + seed, 2, 512, 384)).unwrap();
            for d in &scene.dlos {
                let path = CenterlinePath {
                    pixels: d.centerline.clone(),
                    radii: vec![d.radius; d.centerline.len()],
                    cyclic: false,
                    passages: Vec::new(),
                };
                let m = render_instance(&path, d.mask.dims());
                let score = crate::dice::dice(&m, &d.mask).unwrap();
                assert!(score >= 0.98, "seed {seed} radius {}: {score}", d.radius);
            }
        }
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let scene = generate_scene(&SceneParams::new(8, 3, 512, 384)).unwrap();
        let preds: Vec<DloInstance> = scene
            .dlos
            .iter()
            .enumerate()
            .rev()
            .map(|(k, d)| DloInstance {
                id: k,
                centerline: CenterlinePath {
                    pixels: d.centerline.clone(),
                    radii: Vec::new(),
                    cyclic: false,
                    passages: Vec::new(),
                },
                mask: d.mask.clone(),
                crossings: Vec::new(),
            })
            .collect();
        let r = evaluate(&preds, &scene).unwrap();
        assert_eq!(r.mean, 1.0);
    }
}
