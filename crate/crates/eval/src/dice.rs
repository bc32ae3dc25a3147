//! DICE overlap and greedy instance matching.

use serde::Serialize;

use dlo_core::BinaryMask;

use crate::error::Result;

/// `2|a ∩ b| / (|a| + |b|)`, 1 when both are empty.
pub fn dice(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    let inter = a.intersection_count(b)?;
    let total = a.count() + b.count();
    if total == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / total as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiceReport {
    /// One score per matched pair plus a zero per unmatched instance on
    /// either side: `max(#truth, #pred)` entries.
    pub scores: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of `scores`.
    pub std: f64,
    pub unmatched_predictions: usize,
    pub unmatched_truths: usize,
    /// `(prediction, truth)` index pairs, in match order.
    #[serde(skip)]
    pub matches: Vec<(usize, usize)>,
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Scores every prediction/truth pair, then matches one-to-one in order of
/// decreasing DICE. Pairs with no overlap are never matched. Equal scores are
/// ordered by mask content rather than by position, so the result does not
/// depend on the order predictions come in.
pub fn match_instances(pred: &[&BinaryMask], truth: &[&BinaryMask]) -> Result<DiceReport> {
    let mut by_content: Vec<usize> = (0..pred.len()).collect();
    by_content.sort_by(|&a, &b| pred[a].bits().cmp(pred[b].bits()));
    let mut rank = vec![0; pred.len()];
    for (r, &i) in by_content.iter().enumerate() {
        rank[i] = r;
    }
    let mut pairs = Vec::with_capacity(pred.len() * truth.len());
    for (i, p) in pred.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            let d = dice(p, t)?;
            if d > 0.0 {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then((rank[a.1], a.2).cmp(&(rank[b.1], b.2))));
    let (mut used_p, mut used_t) = (vec![false; pred.len()], vec![false; truth.len()]);
    let mut scores = Vec::new();
    let mut matches = Vec::new();
    for (d, i, j) in pairs {
        if !used_p[i] && !used_t[j] {
            used_p[i] = true;
            used_t[j] = true;
            scores.push(d);
            matches.push((i, j));
        }
    }
    let unmatched_predictions = used_p.iter().filter(|u| !**u).count();
    let unmatched_truths = used_t.iter().filter(|u| !**u).count();
    scores.resize(pred.len().max(truth.len()), 0.0);
    let (mean, std) = mean_std(&scores);
    Ok(DiceReport {
        scores,
        mean,
        std,
        unmatched_predictions,
        unmatched_truths,
        matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use dlo_core::Px;
    use proptest::prelude::*;

    fn rect(w: usize, h: usize, x0: i32, y0: i32, x1: i32, y1: i32) -> BinaryMask {
        let mut m = BinaryMask::new(w, h);
        for y in y0..y1 {
            for x in x0..x1 {
                m.set(Px::new(x, y), true);
            }
        }
        m
    }

    #[test]
    fn dice_examples() {
        let a = rect(20, 20, 0, 0, 10, 10);
        assert_eq!(dice(&a, &a).unwrap(), 1.0);
        assert_eq!(dice(&a, &rect(20, 20, 10, 10, 20, 20)).unwrap(), 0.0);
        let small = rect(20, 20, 0, 0, 10, 5);
        assert!((dice(&small, &a).unwrap() - 100.0 / 150.0).abs() < 1e-9);
        let e = BinaryMask::new(4, 4);
        assert_eq!(dice(&e, &e).unwrap(), 1.0);
        assert!(dice(&a, &BinaryMask::new(3, 3)).is_err());
    }

    #[test]
    fn permuted_perfect_predictions_score_one() {
        let t = [
            rect(30, 30, 0, 0, 5, 30),
            rect(30, 30, 10, 0, 15, 30),
            rect(30, 30, 20, 0, 25, 30),
        ];
        let p = [&t[2], &t[0], &t[1]];
        let r = match_instances(&p, &t.iter().collect::<Vec<_>>()).unwrap();
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.unmatched_predictions + r.unmatched_truths, 0);
    }

    #[test]
    fn missed_truth_halves_the_mean() {
        let t = [rect(30, 30, 0, 0, 5, 30), rect(30, 30, 10, 0, 15, 30)];
        let r = match_instances(&[&t[0]], &[&t[0], &t[1]]).unwrap();
        assert_eq!(r.mean, 0.5);
        assert_eq!(r.unmatched_truths, 1);
        let r = match_instances(&[], &[&t[0], &t[1]]).unwrap();
        assert_eq!(r.mean, 0.0);
        assert_eq!(r.unmatched_truths, 2);
        assert_eq!(r.scores.len(), 2);
    }

    #[test]
    fn spurious_prediction_is_penalized() {
        let t = rect(30, 30, 0, 0, 5, 30);
        let extra = rect(30, 30, 20, 0, 25, 30);
        let r = match_instances(&[&t, &extra], &[&t]).unwrap();
        assert_eq!(r.unmatched_predictions, 1);
        assert_eq!(r.mean, 0.5);
    }

    fn arb_mask() -> impl Strategy<Value = BinaryMask> {
        prop::collection::vec(any::<bool>(), 64).prop_map(|bits| BinaryMask::from_bits(8, 8, bits).unwrap())
    }

    proptest! {
        #[test]
        fn dice_is_symmetric_and_bounded(a in arb_mask(), b in arb_mask()) {
            let d = dice(&a, &b).unwrap();
            prop_assert_eq!(d, dice(&b, &a).unwrap());
            prop_assert!((0.0..=1.0).contains(&d));
        }

        #[test]
        fn matching_ignores_prediction_order(ms in prop::collection::vec(arb_mask(), 1..5), ts in prop::collection::vec(arb_mask(), 1..5), rot in 0usize..5) {
            let mut p: Vec<&BinaryMask> = ms.iter().collect();
            let t: Vec<&BinaryMask> = ts.iter().collect();
            let a = match_instances(&p, &t).unwrap();
            let k = rot % p.len();
            p.rotate_left(k);
            p.reverse();
            let b = match_instances(&p, &t).unwrap();
            let mut sa = a.scores.clone();
            let mut sb = b.scores.clone();
            sa.sort_by(f64::total_cmp);
            sb.sort_by(f64::total_cmp);
            prop_assert_eq!(sa, sb);
        }
    }
}
