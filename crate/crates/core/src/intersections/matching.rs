//! Greedy pairing of nearby Y branches that come from one crossing.

use super::cluster::{BranchCluster, BranchKind};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct YMatching {
    /// Index pairs into the cluster list, in match order.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_y: Vec<usize>,
    pub x: Vec<usize>,
}

/// Sorts all Y–Y combinations by centroid distance and matches greedily,
/// stopping once the distance exceeds `epsilon`.
pub fn match_y_branches(clusters: &[BranchCluster], epsilon: f64) -> YMatching {
    let ys: Vec<usize> = (0..clusters.len())
        .filter(|&i| clusters[i].kind == BranchKind::Y)
        .collect();
    let x = (0..clusters.len())
        .filter(|&i| clusters[i].kind == BranchKind::X)
        .collect();

    let mut combos = Vec::new();
    for (k, &a) in ys.iter().enumerate() {
        for &b in &ys[k + 1..] {
            combos.push((clusters[a].distance_to(&clusters[b]), a, b));
        }
    }
    combos.sort_by(|p, q| p.0.total_cmp(&q.0).then((p.1, p.2).cmp(&(q.1, q.2))));

    let mut taken = vec![false; clusters.len()];
    let mut pairs = Vec::new();
    for (d, a, b) in combos {
        if d > epsilon {
            break;
        }
        if !taken[a] && !taken[b] {
            taken[a] = true;
            taken[b] = true;
            pairs.push((a, b));
        }
    }
    let unmatched_y = ys.into_iter().filter(|&i| !taken[i]).collect();
    YMatching { pairs, unmatched_y, x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Px;
    use proptest::prelude::*;

    fn cl(x: f64, y: f64, kind: BranchKind) -> BranchCluster {
        BranchCluster {
            members: vec![Px::new(x as i32, y as i32)],
            centroid: [x, y],
            kind,
        }
    }

    #[test]
    fn close_pair_matches() {
        let c = [cl(0.0, 0.0, BranchKind::Y), cl(5.0, 0.0, BranchKind::Y)];
        let m = match_y_branches(&c, 40.0);
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert!(m.unmatched_y.is_empty());
    }

    #[test]
    fn limit_cuts_off_far_pairs() {
        // pairwise distances 4, 50, ~52
        let c = [
            cl(0.0, 0.0, BranchKind::Y),
            cl(4.0, 0.0, BranchKind::Y),
            cl(0.0, 50.0, BranchKind::Y),
        ];
        let m = match_y_branches(&c, 40.0);
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert_eq!(m.unmatched_y, vec![2]);
    }

    #[test]
    fn x_clusters_pass_through() {
        let c = [
            cl(0.0, 0.0, BranchKind::X),
            cl(9.0, 0.0, BranchKind::X),
            cl(0.0, 9.0, BranchKind::X),
        ];
        let m = match_y_branches(&c, 40.0);
        assert!(m.pairs.is_empty() && m.unmatched_y.is_empty());
        assert_eq!(m.x, vec![0, 1, 2]);
    }

    proptest! {
        #[test]
        fn matching_is_greedy_and_bounded(pts in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 0..12), eps in 1.0f64..60.0) {
            let c: Vec<BranchCluster> = pts.iter().map(|&(x, y)| cl(x, y, BranchKind::Y)).collect();
            let m = match_y_branches(&c, eps);
            let d = |a: usize, b: usize| c[a].distance_to(&c[b]);
            for &(a, b) in &m.pairs {
                prop_assert!(d(a, b) <= eps);
            }
            // pairs come out in nondecreasing distance
            for w in m.pairs.windows(2) {
                prop_assert!(d(w[0].0, w[0].1) <= d(w[1].0, w[1].1));
            }
            // no two unmatched Ys are within epsilon
            for (k, &a) in m.unmatched_y.iter().enumerate() {
                for &b in &m.unmatched_y[k + 1..] {
                    prop_assert!(d(a, b) > eps);
                }
            }
            // a matched pair is never beaten by a cheaper pair formed with a partner matched later
            for (k, &(a, b)) in m.pairs.iter().enumerate() {
                for &(c2, d2) in &m.pairs[k + 1..] {
                    for (u, v) in [(a, c2), (a, d2), (b, c2), (b, d2)] {
                        prop_assert!(d(u, v) >= d(a, b) - 1e-12);
                    }
                }
            }
            prop_assert_eq!(m.pairs.len() * 2 + m.unmatched_y.len(), c.len());
        }
    }
}
