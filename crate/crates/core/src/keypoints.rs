//! Keypoint classification and split-end pruning.
//!
//! Convolving the skeleton with the kernel
//!
//! ```text
//! 1  1  1
//! 1 10  1
//! 1  1  1
//! ```
//!
//! over skeleton pixels gives `10 + neighbors`: 11 marks an end, 12 a regular
//! segment pixel and anything above 12 an intersection pixel. Isolated pixels
//! (10) are erased.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::raster::Px;
use crate::skeleton::SkeletonMask;
use crate::walk::{next_step, Step};

/// The fixed 3x3 classification kernel.
pub const KERNEL: [[u8; 3]; 3] = [[1, 1, 1], [1, 10, 1], [1, 1, 1]];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PixelClass {
    Isolated,
    End,
    Regular,
    Intersection,
}

impl PixelClass {
    pub fn from_response(value: u8) -> Self {
        match value {
            10 => PixelClass::Isolated,
            11 => PixelClass::End,
            12 => PixelClass::Regular,
            _ => PixelClass::Intersection,
        }
    }
}

/// Kernel response at a skeleton pixel; background pixels contribute 0.
pub fn kernel_response(sk: &SkeletonMask, p: Px) -> u8 {
    let mut acc = 0u8;
    for (ky, row) in KERNEL.iter().enumerate() {
        for (kx, &weight) in row.iter().enumerate() {
            let q = p.offset(kx as i32 - 1, ky as i32 - 1);
            if sk.contains(q) {
                acc += weight;
            }
        }
    }
    acc
}

/// Ends `E` and intersection pixels `I`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KeypointSet {
    pub ends: BTreeSet<Px>,
    pub intersections: BTreeSet<Px>,
}

/// Classifies every skeleton pixel, erasing isolated ones.
pub fn classify(sk: &mut SkeletonMask) -> KeypointSet {
    let mut kp = KeypointSet::default();
    let pixels: Vec<Px> = sk.pixels().collect();
    for p in pixels {
        kp.update(sk, p);
    }
    kp
}

impl KeypointSet {
    /// Re-derives the class of a single pixel from the current skeleton.
    fn update(&mut self, sk: &mut SkeletonMask, p: Px) {
        self.ends.remove(&p);
        self.intersections.remove(&p);
        if !sk.contains(p) {
            return;
        }
        match PixelClass::from_response(kernel_response(sk, p)) {
            PixelClass::Isolated => sk.remove(p),
            PixelClass::End => {
                self.ends.insert(p);
            }
            PixelClass::Regular => {}
            PixelClass::Intersection => {
                self.intersections.insert(p);
            }
        }
    }

    /// Re-classifies the 3x3 neighborhood of every pixel in `changed`.
    fn reclassify_around(&mut self, sk: &mut SkeletonMask, changed: &[Px]) {
        let mut touched: Vec<Px> = changed
            .iter()
            .flat_map(|&p| std::iter::once(p).chain(p.neighbors8()))
            .collect();
        touched.sort_unstable();
        touched.dedup();
        for q in touched {
            self.update(sk, q);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Walked {
    /// Reached a fork at the last pixel of the walk.
    Intersection(Vec<Px>),
    /// Reached another end; the walk holds both ends.
    End(Vec<Px>),
    /// Went `delta` pixels without meeting either.
    Neither,
}

fn walk_from_end(sk: &SkeletonMask, end: Px, delta: usize) -> Walked {
    let mut path = vec![end];
    loop {
        let cur = *path.last().expect("nonempty");
        match next_step(sk, cur, |q| path.contains(&q)) {
            Step::Stop => return Walked::End(path),
            Step::Fork(_) => return Walked::Intersection(path),
            Step::Next(q) => {
                if path.len() >= delta {
                    return Walked::Neither;
                }
                path.push(q);
            }
        }
    }
}

/// True if removing `p` cannot split its neighbors apart.
fn is_simple(sk: &SkeletonMask, p: Px) -> bool {
    let ring: Vec<Px> = p.neighbors8().filter(|&q| sk.contains(q)).collect();
    if ring.len() < 2 {
        return false;
    }
    let mut reached = vec![false; ring.len()];
    let mut stack = vec![0];
    reached[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..ring.len() {
            if !reached[j] && ring[i].is_adjacent8(ring[j]) {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// Removes split ends: short branches that end within `delta` walked pixels
/// of an intersection, and segments of at most `delta` pixels with an end on
/// both sides. Repeats until a pass removes nothing.
pub fn prune_split_ends(mut kp: KeypointSet, mut sk: SkeletonMask, delta: u32) -> (KeypointSet, SkeletonMask) {
    let delta = delta.max(1) as usize;
    loop {
        let mut pruned_any = false;
        let ends: Vec<Px> = kp.ends.iter().copied().collect();
        for end in ends {
            if !kp.ends.contains(&end) {
                continue;
            }
            let erased = match walk_from_end(&sk, end, delta) {
                Walked::Neither => continue,
                Walked::End(path) => path,
                Walked::Intersection(mut path) => {
                    let junction = path.pop().expect("walk holds the junction");
                    for &p in &path {
                        sk.remove(p);
                    }
                    // the pixel the branch hung from goes too when it was only a bump
                    if is_simple(&sk, junction) {
                        path.push(junction);
                    }
                    path
                }
            };
            for &p in &erased {
                sk.remove(p);
            }
            kp.reclassify_around(&mut sk, &erased);
            pruned_any = true;
        }
        if !pruned_any {
            return (kp, sk);
        }
    }
}
