//! Rewiring a crossing into a single X-shaped patch.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::cluster::{emanating_arms, BranchCluster, BranchKind};
use super::energy::{pair_ends_min_energy, Pairing};
use crate::error::{Error, Result};
use crate::imgproc::DistanceMap;
use crate::raster::{line_pixels, Px};
use crate::skeleton::SkeletonMask;
use crate::walk::{next_step, Step};

/// Minimum walked distance from the branch to a generated end.
pub const MIN_CUT: usize = 3;
/// Pixels sampled past each generated end when judging crossing order.
pub const ARM_EXTENSION: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    X,
    YPair,
    /// A Y left without partner: a DLO end lying on another DLO.
    SingleY,
}

/// Ordered pixels of one strand through the patch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThroughPath {
    /// Index of the generated end the pixels start at.
    pub from: usize,
    /// Index of the generated end they finish at; `None` when the strand
    /// stops at the center.
    pub to: Option<usize>,
    pub pixels: Vec<Px>,
}

impl ThroughPath {
    /// Pixels as walked when entering at generated end `end`.
    pub fn entered_from(&self, end: usize) -> Vec<Px> {
        if end == self.from {
            self.pixels.clone()
        } else {
            self.pixels.iter().rev().copied().collect()
        }
    }

    /// The generated end opposite `end`, if any.
    pub fn exit_for(&self, end: usize) -> Option<usize> {
        if end == self.from {
            self.to
        } else {
            Some(self.from)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Intersection {
    pub center: Px,
    pub kind: CrossingKind,
    /// Sorted lexicographically.
    pub generated_ends: Vec<Px>,
    /// Per generated end, the straight run from that end to the center.
    pub lines: Vec<Vec<Px>>,
    pub pairing: Pairing,
    pub through_paths: Vec<ThroughPath>,
    /// Per generated end, up to [`ARM_EXTENSION`] skeleton pixels beyond it.
    pub arm_extensions: Vec<Vec<Px>>,
}

impl Intersection {
    /// All patch pixels (lines including generated ends and center).
    pub fn patch_pixels(&self) -> impl Iterator<Item = Px> + '_ {
        self.lines.iter().flatten().copied()
    }

    pub fn end_index(&self, p: Px) -> Option<usize> {
        self.generated_ends.binary_search(&p).ok()
    }

    /// Index of the through-path containing generated end `end`.
    pub fn strand_of(&self, end: usize) -> Option<usize> {
        self.through_paths
            .iter()
            .position(|t| t.from == end || t.to == Some(end))
    }
}

/// State shared across the sequential rewiring of all crossings.
#[derive(Debug, Default)]
pub(crate) struct PatchBook {
    /// Every pixel drawn by a patch so far.
    pub reserved: HashSet<Px>,
    pub generated: HashSet<Px>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ArmStop {
    End,
    Fork,
    Limit,
    Cluster(usize),
    Patch,
}

#[derive(Clone, Debug)]
struct ArmWalk {
    cluster: usize,
    pixels: Vec<Px>,
    stop: ArmStop,
}

/// Walks outward from the pixels `ring` that touch cluster `owner`.
fn walk_arm(
    sk: &SkeletonMask,
    ring: &[Px],
    owner: usize,
    clusters: &[BranchCluster],
    membership: &HashMap<Px, usize>,
    book: &PatchBook,
    max_len: usize,
) -> Option<ArmWalk> {
    let own: HashSet<Px> = clusters[owner].members.iter().copied().collect();
    let gap = |q: Px| own.iter().map(|&m| m.dist2(q)).min().unwrap_or(i64::MAX);
    let start = ring
        .iter()
        .copied()
        .filter(|q| !book.reserved.contains(q))
        .min_by_key(|&q| (gap(q), q))?;
    let mut pixels = vec![start];
    let mut walked: HashSet<Px> = HashSet::from([start]);
    let stop = loop {
        let cur = *pixels.last().expect("nonempty");
        if let Some(k) = cur
            .neighbors8()
            .filter_map(|n| membership.get(&n).copied())
            .find(|&k| k != owner)
        {
            break ArmStop::Cluster(k);
        }
        if pixels.len() > 1 && cur.neighbors8().any(|n| book.generated.contains(&n)) {
            break ArmStop::Patch;
        }
        if pixels.len() >= max_len {
            break ArmStop::Limit;
        }
        let blocked = |q: Px| own.contains(&q) || walked.contains(&q) || book.reserved.contains(&q);
        match next_step(sk, cur, blocked) {
            Step::Stop => break ArmStop::End,
            Step::Fork(_) => break ArmStop::Fork,
            Step::Next(q) => {
                pixels.push(q);
                walked.insert(q);
            }
        }
    };
    Some(ArmWalk {
        cluster: owner,
        pixels,
        stop,
    })
}

fn rounded_center(clusters: &[BranchCluster], group: &[usize]) -> Px {
    let n = group.len() as f64;
    let cx = group.iter().map(|&i| clusters[i].centroid[0]).sum::<f64>() / n;
    let cy = group.iter().map(|&i| clusters[i].centroid[1]).sum::<f64>() / n;
    Px::new(cx.round() as i32, cy.round() as i32)
}

pub(crate) fn group_center(clusters: &[BranchCluster], group: &[usize]) -> Px {
    rounded_center(clusters, group)
}

/// Walk distance from the branch at which arms are cut.
pub fn cut_length(dist: &DistanceMap, center: Px) -> usize {
    MIN_CUT.max((2.0 * dist.get(center) - 1e-9).ceil().max(0.0) as usize)
}

/// Rewires the crossing formed by the clusters in `group` (one X, one Y, or
/// a matched Y pair). A Y pair that does not behave as one crossing is
/// split and each Y rewired alone.
pub(crate) fn replace_group(
    sk: &mut SkeletonMask,
    dist: &DistanceMap,
    clusters: &[BranchCluster],
    group: &[usize],
    membership: &HashMap<Px, usize>,
    book: &mut PatchBook,
) -> Result<Vec<Intersection>> {
    let center = rounded_center(clusters, group);
    let cut = cut_length(dist, center);
    let max_len = if group.len() == 2 {
        let span = clusters[group[0]].distance_to(&clusters[group[1]]);
        cut.max((2.0 * span).ceil() as usize + 4)
    } else {
        cut
    };

    let mut internal = Vec::new();
    let mut external = Vec::new();
    for &c in group {
        for ring in emanating_arms(&clusters[c].members, sk) {
            let Some(arm) = walk_arm(sk, &ring, c, clusters, membership, book, max_len) else {
                continue;
            };
            match arm.stop {
                ArmStop::Cluster(k) if group.contains(&k) => internal.push(arm),
                _ => external.push(arm),
            }
        }
    }

    if group.len() == 2 {
        let internal_per_side = |c: usize| internal.iter().filter(|a| a.cluster == c).count();
        if external.len() != 4 || group.iter().any(|&c| internal_per_side(c) != 1) {
            let mut out = Vec::new();
            for &c in group {
                out.extend(replace_group(sk, dist, clusters, &[c], membership, book)?);
            }
            return Ok(out);
        }
    }
    if external.len() < 2 {
        return Err(Error::topology(
            center,
            format!("{} segments leave the crossing", external.len()),
        ));
    }
    if external.len() > 4 {
        return Err(Error::UnsupportedIntersection {
            at: center,
            segments: external.len(),
        });
    }

    // erase the branch, the connector between paired Ys, and every arm up to its cut
    let mut erased: Vec<Px> = group
        .iter()
        .flat_map(|&c| clusters[c].members.iter().copied())
        .collect();
    erased.extend(internal.iter().flat_map(|a| a.pixels.iter().copied()));
    let mut ends = Vec::with_capacity(external.len());
    for arm in &external {
        let keep = arm.pixels.len().min(cut) - 1;
        erased.extend_from_slice(&arm.pixels[..keep]);
        ends.push(arm.pixels[keep]);
    }
    for &p in &erased {
        sk.remove(p);
    }
    clear_debris(sk, &erased, &ends, book);

    ends.sort_unstable();
    ends.dedup();
    let lines: Vec<Vec<Px>> = ends.iter().map(|&e| line_pixels(e, center)).collect();
    for p in lines.iter().flatten() {
        sk.insert(*p);
        book.reserved.insert(*p);
    }
    book.generated.extend(ends.iter().copied());

    let pairing = pair_ends_min_energy(center, &ends);
    let mut through_paths = Vec::new();
    let mut paired = vec![false; ends.len()];
    for &(a, b) in pairing.pairs() {
        paired[a] = true;
        paired[b] = true;
        let mut pixels = lines[a].clone();
        pixels.extend(lines[b].iter().rev().skip(1));
        through_paths.push(ThroughPath {
            from: a,
            to: Some(b),
            pixels,
        });
    }
    for (k, _) in paired.iter().enumerate().filter(|(_, p)| !**p) {
        through_paths.push(ThroughPath {
            from: k,
            to: None,
            pixels: lines[k].clone(),
        });
    }

    let arm_extensions = ends.iter().map(|&e| extension(sk, e, &book.reserved)).collect();
    let kind = match (group.len(), clusters[group[0]].kind) {
        (2, _) => CrossingKind::YPair,
        (_, BranchKind::X) => CrossingKind::X,
        (_, BranchKind::Y) => CrossingKind::SingleY,
    };
    Ok(vec![Intersection {
        center,
        kind,
        generated_ends: ends,
        lines,
        pairing,
        through_paths,
        arm_extensions,
    }])
}

/// Up to [`ARM_EXTENSION`] pixels walked outward from a generated end.
fn extension(sk: &SkeletonMask, end: Px, reserved: &HashSet<Px>) -> Vec<Px> {
    let mut out: Vec<Px> = Vec::new();
    let mut cur = end;
    while out.len() < ARM_EXTENSION {
        match next_step(sk, cur, |q| reserved.contains(&q) || out.contains(&q)) {
            Step::Next(q) => {
                out.push(q);
                cur = q;
            }
            _ => break,
        }
    }
    out
}

/// Removes fragments left stranded near the erased region: pieces that do
/// not hold a generated end and do not run out of the neighborhood.
fn clear_debris(sk: &mut SkeletonMask, erased: &[Px], ends: &[Px], book: &PatchBook) {
    let Some(first) = erased.first() else { return };
    let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x, first.y);
    for p in erased {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let (x0, y0, x1, y1) = (x0 - 2, y0 - 2, x1 + 2, y1 + 2);
    let inside = |p: Px| p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    let on_frame = |p: Px| p.x == x0 || p.x == x1 || p.y == y0 || p.y == y1;

    let mut seen = BTreeSet::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            let s = Px::new(x, y);
            if !sk.contains(s) || book.reserved.contains(&s) || !seen.insert(s) {
                continue;
            }
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let p = comp[i];
                i += 1;
                for n in p.neighbors8() {
                    if inside(n) && sk.contains(n) && !book.reserved.contains(&n) && seen.insert(n) {
                        comp.push(n);
                    }
                }
            }
            let anchored = comp.iter().any(|p| on_frame(*p) || ends.contains(p));
            if !anchored {
                for p in comp {
                    sk.remove(p);
                }
            }
        }
    }
}
