//! Grouping of intersection pixels into branches and counting the segments
//! that leave each branch.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::Px;
use crate::skeleton::SkeletonMask;

/// Neighborhood distance for clustering intersection pixels.
pub const CLUSTER_EPS: f64 = 2.0;
/// Every intersection pixel belongs to some branch.
pub const CLUSTER_MIN_POINTS: usize = 1;
/// Chebyshev reach of the window used to separate emanating segments.
const ARM_WINDOW: i32 = 3;

/// DBSCAN over pixel coordinates. Returns a cluster label per point, or
/// `None` for noise. Labels are assigned in order of first discovery.
pub fn dbscan(points: &[Px], eps: f64, min_points: usize) -> Vec<Option<usize>> {
    let reach = eps.floor() as i32;
    let eps2 = eps * eps + 1e-9;
    let mut grid: HashMap<Px, Vec<usize>> = HashMap::new();
    let cell = |p: Px| Px::new(p.x.div_euclid(reach.max(1)), p.y.div_euclid(reach.max(1)));
    for (i, &p) in points.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }
    let neighbors = |i: usize| -> Vec<usize> {
        let c = cell(points[i]);
        let mut out = Vec::new();
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(bucket) = grid.get(&c.offset(dx, dy)) {
                    out.extend(
                        bucket
                            .iter()
                            .copied()
                            .filter(|&j| points[i].dist2(points[j]) as f64 <= eps2),
                    );
                }
            }
        }
        out
    };

    let mut labels: Vec<Option<usize>> = vec![None; points.len()];
    let mut visited = vec![false; points.len()];
    let mut next_label = 0;
    for start in 0..points.len() {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let seeds = neighbors(start);
        if seeds.len() < min_points {
            continue;
        }
        let label = next_label;
        next_label += 1;
        labels[start] = Some(label);
        let mut queue = seeds;
        while let Some(j) = queue.pop() {
            if labels[j].is_none() {
                labels[j] = Some(label);
            }
            if visited[j] {
                continue;
            }
            visited[j] = true;
            let more = neighbors(j);
            if more.len() >= min_points {
                queue.extend(more);
            }
        }
    }
    labels
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BranchKind {
    /// Three emanating segments.
    Y,
    /// Four emanating segments.
    X,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchCluster {
    pub members: Vec<Px>,
    pub centroid: [f64; 2],
    pub kind: BranchKind,
}

impl BranchCluster {
    pub fn distance_to(&self, other: &BranchCluster) -> f64 {
        let dx = self.centroid[0] - other.centroid[0];
        let dy = self.centroid[1] - other.centroid[1];
        dx.hypot(dy)
    }
}

/// Clusters of raw intersection pixels, before dropping those that are not
/// real branches.
pub fn cluster_members(intersections: &BTreeSet<Px>) -> Vec<Vec<Px>> {
    let points: Vec<Px> = intersections.iter().copied().collect();
    let labels = dbscan(&points, CLUSTER_EPS, CLUSTER_MIN_POINTS);
    let count = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let mut groups = vec![Vec::new(); count];
    for (p, label) in points.into_iter().zip(labels) {
        if let Some(l) = label {
            groups[l].push(p);
        }
    }
    groups
}

/// Segments leaving a pixel cluster: connected runs of skeleton pixels near
/// the cluster that hold a pixel adjacent to it and reach at least two
/// pixels away from it (so corner bumps do not count). Each arm is returned
/// as its pixels adjacent to the cluster.
pub fn emanating_arms(members: &[Px], sk: &SkeletonMask) -> Vec<Vec<Px>> {
    let own: BTreeSet<Px> = members.iter().copied().collect();
    let mut window = BTreeSet::new();
    for &m in members {
        for dy in -ARM_WINDOW..=ARM_WINDOW {
            for dx in -ARM_WINDOW..=ARM_WINDOW {
                let q = m.offset(dx, dy);
                if sk.contains(q) && !own.contains(&q) {
                    window.insert(q);
                }
            }
        }
    }
    let touches = |q: Px| q.neighbors8().any(|n| own.contains(&n));

    let mut arms = Vec::new();
    let mut seen = BTreeSet::new();
    for &start in &window {
        if seen.contains(&start) || !touches(start) {
            continue;
        }
        let mut ring = Vec::new();
        let mut reaches_out = false;
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(q) = stack.pop() {
            if touches(q) {
                ring.push(q);
            } else {
                reaches_out = true;
            }
            for n in q.neighbors8() {
                if window.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        if reaches_out {
            ring.sort_unstable();
            arms.push(ring);
        }
    }
    arms
}

/// Groups intersection pixels (DBSCAN, eps 2, min size 1) and types each
/// group by how many segments leave it. Groups with fewer than three
/// segments are staircase or bump artifacts of the thinning and are dropped.
pub fn cluster_pixels(intersections: &BTreeSet<Px>, sk: &SkeletonMask) -> Result<Vec<BranchCluster>> {
    let mut out = Vec::new();
    for members in cluster_members(intersections) {
        let arms = emanating_arms(&members, sk).len();
        let kind = match arms {
            0..=2 => continue,
            3 => BranchKind::Y,
            4 => BranchKind::X,
            n => {
                return Err(Error::UnsupportedIntersection {
                    at: members[0],
                    segments: n,
                })
            }
        };
        let n = members.len() as f64;
        let cx = members.iter().map(|p| f64::from(p.x)).sum::<f64>() / n;
        let cy = members.iter().map(|p| f64::from(p.y)).sum::<f64>() / n;
        out.push(BranchCluster {
            members,
            centroid: [cx, cy],
            kind,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::BinaryMask;

    fn sk(rows: &[&str]) -> SkeletonMask {
        SkeletonMask::from_mask(BinaryMask::from_ascii(rows))
    }

    #[test]
    fn dbscan_links_within_two_pixels_only() {
        let pts = [
            Px::new(0, 0),
            Px::new(1, 1),
            Px::new(3, 1),
            Px::new(10, 10),
            Px::new(13, 12),
        ];
        let labels = dbscan(&pts, CLUSTER_EPS, CLUSTER_MIN_POINTS);
        assert_eq!(labels[0], labels[1]);
        // (1,1)-(3,1) is exactly 2 apart
        assert_eq!(labels[1], labels[2]);
        assert_ne!(labels[3], labels[4]);
        assert!(labels.iter().all(Option::is_some));
    }

    #[test]
    fn dbscan_marks_noise_when_min_points_unmet() {
        let pts = [Px::new(0, 0), Px::new(1, 0), Px::new(9, 9)];
        let labels = dbscan(&pts, 2.0, 2);
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[2], None);
    }

    #[test]
    fn diagonal_pair_is_one_cluster_at_midpoint() {
        // an X whose center is two diagonal intersection pixels
        let s = sk(&[
            "#.....#", //
            ".#...#.", //
            "..#.#..", //
            "...##..", //
            "..#..#.", //
            ".#....#", //
        ]);
        let mut s2 = s.clone();
        let kp = crate::keypoints::classify(&mut s2);
        let pair: BTreeSet<Px> = [Px::new(3, 3), Px::new(4, 2)].into_iter().collect();
        let clusters = cluster_pixels(&pair, &s2).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].centroid, [3.5, 2.5]);
        assert!(!kp.intersections.is_empty());
    }

    #[test]
    fn separated_pixels_form_two_clusters() {
        let pts: BTreeSet<Px> = [Px::new(0, 0), Px::new(3, 2)].into_iter().collect();
        // 3.6 px apart
        assert_eq!(cluster_members(&pts).len(), 2);
    }

    #[test]
    fn empty_input_gives_no_clusters() {
        let s = SkeletonMask::new(5, 5);
        assert!(cluster_pixels(&BTreeSet::new(), &s).unwrap().is_empty());
    }

    #[test]
    fn kinds_from_arm_count() {
        let t = sk(&["#########", "....#....", "....#....", "....#....", "....#...."]);
        let mut t2 = t.clone();
        let kp = crate::keypoints::classify(&mut t2);
        let c = cluster_pixels(&kp.intersections, &t2).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, BranchKind::Y);

        let plus = sk(&[
            "....#....",
            "....#....",
            "....#....",
            "....#....",
            "#########",
            "....#....",
            "....#....",
            "....#....",
            "....#....",
        ]);
        let mut p2 = plus.clone();
        let kp = crate::keypoints::classify(&mut p2);
        let c = cluster_pixels(&kp.intersections, &p2).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, BranchKind::X);
        assert_eq!(c[0].centroid, [4.0, 4.0]);
    }

    #[test]
    fn staircase_corner_is_not_a_branch() {
        let s = sk(&["###.....", "..#.....", "..######"]);
        let mut s2 = s.clone();
        let kp = crate::keypoints::classify(&mut s2);
        assert!(!kp.intersections.is_empty());
        assert!(cluster_pixels(&kp.intersections, &s2).unwrap().is_empty());
    }

    #[test]
    fn five_segments_is_unsupported() {
        let s = sk(&[
            "....#....", //
            "....#....", //
            "....#....", //
            "....#....", //
            "#########", //
            "...#.#...", //
            "..#...#..", //
            ".#.....#.", //
            "#.......#", //
        ]);
        let mut s2 = s.clone();
        let kp = crate::keypoints::classify(&mut s2);
        match cluster_pixels(&kp.intersections, &s2) {
            Err(Error::UnsupportedIntersection { segments, .. }) => assert_eq!(segments, 5),
            other => panic!("expected unsupported intersection, got {other:?}"),
        }
    }
}
