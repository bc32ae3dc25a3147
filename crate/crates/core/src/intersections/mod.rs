//! Crossing detection and repair: cluster intersection pixels, pair the Y
//! branches produced by one crossing, and replace each crossing by a
//! straight X patch with precomputed minimal-bending through-paths.

mod cluster;
mod energy;
mod matching;
mod replace;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

pub use cluster::{
    cluster_members, cluster_pixels, dbscan, emanating_arms, BranchCluster, BranchKind, CLUSTER_EPS, CLUSTER_MIN_POINTS,
};
pub use energy::{
    discrete_curvature, pair_ends_min_energy, pass_curvature, MatchingEnergy, Pairing, Tangent, ANTIPARALLEL_GUARD,
    MATCHINGS,
};
pub use matching::{match_y_branches, YMatching};
pub use replace::{cut_length, CrossingKind, Intersection, ThroughPath, ARM_EXTENSION, MIN_CUT};

use crate::error::Result;
use crate::imgproc::DistanceMap;
use crate::keypoints::KeypointSet;
use crate::raster::Px;
use crate::skeleton::SkeletonMask;

/// Skeleton after every crossing has been rewired.
#[derive(Clone, Debug)]
pub struct Repair {
    pub skeleton: SkeletonMask,
    pub intersections: Vec<Intersection>,
    /// Ends to start tracing from, sorted.
    pub ends: BTreeSet<Px>,
    pub clusters: Vec<BranchCluster>,
}

impl Repair {
    /// Maps every generated end to its intersection and end index.
    pub fn generated_index(&self) -> HashMap<Px, (usize, usize)> {
        let mut out = HashMap::new();
        for (i, inter) in self.intersections.iter().enumerate() {
            for (k, &e) in inter.generated_ends.iter().enumerate() {
                out.insert(e, (i, k));
            }
        }
        out
    }

    /// Patch pixels other than generated ends.
    pub fn patch_interior(&self) -> BTreeSet<Px> {
        let mut out: BTreeSet<Px> = self.intersections.iter().flat_map(|i| i.patch_pixels()).collect();
        for inter in &self.intersections {
            for e in &inter.generated_ends {
                out.remove(e);
            }
        }
        out
    }
}

/// Clusters, matches and rewires every crossing, in order of center.
pub fn repair_intersections(
    kp: &KeypointSet,
    mut sk: SkeletonMask,
    dist: &DistanceMap,
    epsilon: f64,
) -> Result<Repair> {
    let clusters = cluster_pixels(&kp.intersections, &sk)?;
    let matching = match_y_branches(&clusters, epsilon);
    let mut groups: Vec<Vec<usize>> = matching.pairs.iter().map(|&(a, b)| vec![a, b]).collect();
    groups.extend(matching.unmatched_y.iter().map(|&y| vec![y]));
    groups.extend(matching.x.iter().map(|&x| vec![x]));
    groups.sort_by_key(|g| (replace::group_center(&clusters, g), g.clone()));

    let mut membership = HashMap::new();
    for (i, c) in clusters.iter().enumerate() {
        for &m in &c.members {
            membership.insert(m, i);
        }
    }

    let mut book = replace::PatchBook::default();
    let mut intersections = Vec::new();
    for group in &groups {
        intersections.extend(replace::replace_group(
            &mut sk,
            dist,
            &clusters,
            group,
            &membership,
            &mut book,
        )?);
    }

    // drop pixels the rewiring left isolated; ends are the remaining degree-1 pixels
    let isolated: Vec<Px> = sk.pixels().filter(|&p| sk.neighbor_count(p) == 0).collect();
    for p in isolated {
        sk.remove(p);
    }
    let ends = sk
        .pixels()
        .filter(|p| sk.neighbor_count(*p) == 1 && (!book.reserved.contains(p) || book.generated.contains(p)))
        .collect();
    Ok(Repair {
        skeleton: sk,
        intersections,
        ends,
        clusters,
    })
}

/// Debug record for one rewired crossing.
#[derive(Serialize)]
pub struct IntersectionDump<'a> {
    pub center: Px,
    pub kind: CrossingKind,
    pub ends: &'a [Px],
    pub chosen_pairs: Vec<(Px, Px)>,
    pub matchings: &'a [MatchingEnergy],
}

impl<'a> From<&'a Intersection> for IntersectionDump<'a> {
    fn from(i: &'a Intersection) -> Self {
        let e = &i.generated_ends;
        Self {
            center: i.center,
            kind: i.kind,
            ends: e,
            chosen_pairs: i.pairing.pairs().iter().map(|&(a, b)| (e[a], e[b])).collect(),
            matchings: &i.pairing.candidates,
        }
    }
}

#[cfg(test)]
mod tests;
