//! Zhang–Suen thinning.
//!
//! Each iteration runs two parallel subpasses over the current foreground.
//! A pixel `P1` with ring `P2..P9` (N, NE, E, SE, S, SW, W, NW) is deleted
//! when it has between 2 and 6 foreground neighbors, exactly one 0→1
//! transition around the ring, and
//!
//! - subpass 1: `P2·P4·P6 = 0` and `P4·P6·P8 = 0`
//! - subpass 2: `P2·P4·P8 = 0` and `P2·P6·P8 = 0`
//!
//! Two guards keep the output topologically faithful: a subpass never
//! deletes every pixel of a component, and once an iteration deletes nothing,
//! one simple pixel is removed from every remaining 2×2 block and iteration
//! resumes. It stops when neither step changes anything. Pixels outside the image count as
//! background.

use crate::raster::{BinaryMask, Dims, Px};

/// Single-pixel-wide skeleton raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonMask(BinaryMask);

impl SkeletonMask {
    /// Wraps a mask that is already thin. No thinning is performed.
    pub fn from_mask(mask: BinaryMask) -> Self {
        Self(mask)
    }

    pub fn new(width: usize, height: usize) -> Self {
        Self(BinaryMask::new(width, height))
    }

    pub fn dims(&self) -> Dims {
        self.0.dims()
    }

    pub fn contains(&self, p: Px) -> bool {
        self.0.get(p)
    }

    pub fn insert(&mut self, p: Px) {
        self.0.set(p, true);
    }

    pub fn remove(&mut self, p: Px) {
        self.0.set(p, false);
    }

    pub fn count(&self) -> usize {
        self.0.count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pixels(&self) -> impl Iterator<Item = Px> + '_ {
        self.0.iter_foreground()
    }

    pub fn neighbor_count(&self, p: Px) -> usize {
        self.0.count_neighbors8(p)
    }

    pub fn as_mask(&self) -> &BinaryMask {
        &self.0
    }

    pub fn into_mask(self) -> BinaryMask {
        self.0
    }
}

/// Thins `mask` to a one-pixel-wide skeleton.
pub fn thin(mask: &BinaryMask) -> SkeletonMask {
    let dims = mask.dims();
    let (w, h) = (dims.width, dims.height);
    let stride = w + 2;
    // padded copy: one background pixel of frame on every side
    let mut grid = vec![0u8; stride * (h + 2)];
    let mut live = Vec::new();
    for p in mask.iter_foreground() {
        let i = (p.y as usize + 1) * stride + p.x as usize + 1;
        grid[i] = 1;
        live.push(i);
    }

    let ring = ring_offsets(stride);
    let mut doomed = Vec::new();
    let mut stamp = vec![0u32; grid.len()];
    let mut generation = 0;
    loop {
        let mut changed = false;
        for subpass in 0..2 {
            doomed.clear();
            for &i in &live {
                if deletable(&grid, i, &ring, subpass) {
                    doomed.push(i);
                }
            }
            if doomed.is_empty() {
                continue;
            }
            for &i in &doomed {
                grid[i] = 2;
            }
            generation += 2;
            spare_last_pixels(&mut grid, &doomed, &ring, &mut stamp, generation);
            for &i in &doomed {
                if grid[i] == 2 {
                    grid[i] = 0;
                    changed = true;
                }
            }
            live.retain(|&i| grid[i] != 0);
        }
        if changed {
            continue;
        }
        // blocks are only broken once Zhang–Suen itself is stable
        if !break_blocks(&mut grid, &live, stride, &ring) {
            break;
        }
        live.retain(|&i| grid[i] != 0);
    }

    let mut out = BinaryMask::new(w, h);
    for i in live {
        let (x, y) = (i % stride - 1, i / stride - 1);
        out.set(Px::new(x as i32, y as i32), true);
    }
    SkeletonMask(out)
}

/// Marked pixels (value 2) are about to be deleted together. Any component
/// made only of marked pixels would vanish, so its first pixel is kept.
/// `seen` holds `generation` for visited pixels and `generation + 1` for
/// those known to reach an unmarked one.
fn spare_last_pixels(grid: &mut [u8], doomed: &[usize], ring: &[isize; 8], seen: &mut [u32], generation: u32) {
    let mut stack = Vec::new();
    let mut component = Vec::new();
    for &seed in doomed {
        if seen[seed] >= generation {
            continue;
        }
        seen[seed] = generation;
        stack.clear();
        stack.push(seed);
        component.clear();
        let mut anchored = false;
        'search: while let Some(i) = stack.pop() {
            component.push(i);
            for &o in ring {
                let j = (i as isize + o) as usize;
                if grid[j] == 1 || (grid[j] == 2 && seen[j] == generation + 1) {
                    anchored = true;
                    break 'search;
                }
                if grid[j] == 2 && seen[j] < generation {
                    seen[j] = generation;
                    stack.push(j);
                }
            }
        }
        if anchored {
            for &i in &component {
                seen[i] = generation + 1;
            }
            // queued but unexplored pixels may be reached again from elsewhere
            for &i in &stack {
                seen[i] = 0;
            }
        } else {
            grid[*component.iter().min().expect("seeded")] = 1;
        }
    }
}

/// Groups the foreground ring neighbors of `i` into 8-components within
/// the ring; returns one representative ring index per component.
fn ring_components(n: &[bool; 8]) -> Vec<usize> {
    // ring neighbors are adjacent when consecutive, and 4-neighbors two
    // steps apart also touch across the skipped corner
    let mut parent: [usize; 8] = std::array::from_fn(|k| k);
    fn root(parent: &[usize; 8], mut k: usize) -> usize {
        while parent[k] != k {
            k = parent[k];
        }
        k
    }
    for k in 0..8 {
        let steps: &[usize] = if k % 2 == 0 { &[1, 2] } else { &[1] };
        for &d in steps {
            let m = (k + d) % 8;
            if n[k] && n[m] {
                let (a, b) = (root(&parent, k), root(&parent, m));
                parent[a] = b;
            }
        }
    }
    (0..8).filter(|&k| n[k] && root(&parent, k) == k).collect()
}

fn ring_values(grid: &[u8], i: usize, ring: &[isize; 8]) -> [bool; 8] {
    std::array::from_fn(|k| grid[(i as isize + ring[k]) as usize] != 0)
}

/// Deleting `i` changes neither the foreground 8-components nor the
/// background 4-components around it.
fn is_simple(grid: &[u8], i: usize, ring: &[isize; 8]) -> bool {
    let n = ring_values(grid, i, ring);
    if ring_components(&n).len() != 1 {
        return false;
    }
    // background 4-components touching a 4-neighbor of i: runs of background
    // along the ring that contain an even position
    let bg = (0..8)
        .filter(|&k| !n[k] && n[(k + 7) % 8])
        .filter(|&start| {
            let mut k = start;
            while !n[k] {
                if k % 2 == 0 {
                    return true;
                }
                k = (k + 1) % 8;
            }
            false
        })
        .count();
    bg == 1
}

/// Deleting `i` keeps its foreground neighbors in one 8-component of the
/// whole grid, though it may merge background regions.
fn keeps_connected(grid: &mut [u8], i: usize, ring: &[isize; 8]) -> bool {
    let n = ring_values(grid, i, ring);
    let reps = ring_components(&n);
    if reps.len() <= 1 {
        return true;
    }
    let targets: Vec<usize> = reps.iter().map(|&k| (i as isize + ring[k]) as usize).collect();
    let saved = grid[i];
    grid[i] = 0;
    let mut seen = std::collections::HashSet::from([targets[0]]);
    let mut stack = vec![targets[0]];
    let mut left = targets.len() - 1;
    while let Some(j) = stack.pop() {
        for &o in ring {
            let q = (j as isize + o) as usize;
            if grid[q] != 0 && seen.insert(q) {
                if targets[1..].contains(&q) {
                    left -= 1;
                }
                stack.push(q);
            }
        }
        if left == 0 {
            break;
        }
    }
    grid[i] = saved;
    left == 0
}

/// Removes one pixel from every 2×2 foreground block, scanning in raster
/// order: a simple pixel when there is one, otherwise one whose removal
/// keeps the component connected. Returns whether anything was removed.
fn break_blocks(grid: &mut [u8], live: &[usize], stride: usize, ring: &[isize; 8]) -> bool {
    let mut removed = false;
    for &i in live {
        let block = [i, i + 1, i + stride, i + stride + 1];
        if block.iter().any(|&j| grid[j] == 0) {
            continue;
        }
        let pick = match block.iter().find(|&&j| is_simple(grid, j, ring)) {
            Some(&j) => Some(j),
            None => block.iter().copied().find(|&j| keeps_connected(grid, j, ring)),
        };
        if let Some(j) = pick {
            grid[j] = 0;
            removed = true;
        }
    }
    removed
}

/// Padded-buffer offsets of P2..P9.
fn ring_offsets(stride: usize) -> [isize; 8] {
    let s = stride as isize;
    [-s, -s + 1, 1, s + 1, s, s - 1, -1, -s - 1]
}

#[inline]
fn deletable(grid: &[u8], i: usize, ring: &[isize; 8], subpass: usize) -> bool {
    let n: [u8; 8] = std::array::from_fn(|k| grid[(i as isize + ring[k]) as usize]);
    let b: u8 = n.iter().sum();
    if !(2..=6).contains(&b) {
        return false;
    }
    let transitions = (0..8).filter(|&k| n[k] == 0 && n[(k + 1) % 8] == 1).count();
    if transitions != 1 {
        return false;
    }
    let [p2, _, p4, _, p6, _, p8, _] = n;
    if subpass == 0 {
        p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0
    } else {
        p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Straightforward Zhang–Suen written against the bounds-checked mask API,
    /// scanning the whole raster each subpass.
    pub(crate) fn reference_thin(mask: &BinaryMask) -> BinaryMask {
        let mut m = mask.clone();
        let ring = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];
        loop {
            let mut any = false;
            for step in 0..2 {
                let mut kill = Vec::new();
                for y in 0..m.height() as i32 {
                    for x in 0..m.width() as i32 {
                        let p = Px::new(x, y);
                        if !m.get(p) {
                            continue;
                        }
                        let v: Vec<bool> = ring.iter().map(|&(dx, dy)| m.get(p.offset(dx, dy))).collect();
                        let b = v.iter().filter(|&&q| q).count();
                        let a = (0..8).filter(|&k| !v[k] && v[(k + 1) % 8]).count();
                        let (p2, p4, p6, p8) = (v[0], v[2], v[4], v[6]);
                        let c = if step == 0 {
                            !(p2 && p4 && p6) && !(p4 && p6 && p8)
                        } else {
                            !(p2 && p4 && p8) && !(p2 && p6 && p8)
                        };
                        if (2..=6).contains(&b) && a == 1 && c {
                            kill.push(p);
                        }
                    }
                }
                any |= !kill.is_empty();
                for p in kill {
                    m.set(p, false);
                }
            }
            if !any {
                return m;
            }
        }
    }

    #[test]
    fn empty_in_empty_out() {
        assert!(thin(&BinaryMask::new(10, 10)).is_empty());
    }

    #[test]
    fn thin_line_matches_reference_and_survives() {
        let mut m = BinaryMask::new(30, 9);
        for x in 3..27 {
            m.set(Px::new(x, 4), true);
        }
        let reference = reference_thin(&m);
        let sk = thin(&m);
        assert_eq!(sk.as_mask(), &reference);
        // interior of a one-pixel line is never deletable; only the tips may erode
        for x in 5..25 {
            assert!(sk.contains(Px::new(x, 4)));
        }
    }

    #[test]
    fn diagonal_line_matches_reference() {
        let mut m = BinaryMask::new(20, 20);
        for k in 2..18 {
            m.set(Px::new(k, k), true);
        }
        assert_eq!(thin(&m).as_mask(), &reference_thin(&m));
    }

    #[test]
    fn filled_rectangle_gives_horizontal_centerline() {
        let mut m = BinaryMask::new(30, 11);
        for y in 3..8 {
            for x in 5..25 {
                m.set(Px::new(x, y), true);
            }
        }
        let sk = thin(&m);
        assert_eq!(sk.as_mask(), &reference_thin(&m));
        assert_eq!(sk.as_mask().count_components8(), 1);
        assert!(!sk.as_mask().has_full_2x2_block());
        // one pixel per column over the middle of the rectangle
        for x in 8..22 {
            let col: Vec<i32> = (0..11).filter(|&y| sk.contains(Px::new(x, y))).collect();
            assert_eq!(col, vec![5], "column {x}");
        }
    }

    #[test]
    fn border_touching_block_thins_to_a_line() {
        let mut m = BinaryMask::new(12, 4);
        for y in 0..4 {
            for x in 0..12 {
                m.set(Px::new(x, y), true);
            }
        }
        let sk = thin(&m);
        assert!(!sk.is_empty());
        assert_eq!(sk.as_mask().count_components8(), 1);
        assert_eq!(sk.as_mask(), &reference_thin(&m));
    }

    #[test]
    fn lone_square_keeps_a_pixel() {
        let m = BinaryMask::from_ascii(&["......", "..##..", "..##..", "......"]);
        let sk = thin(&m);
        assert_eq!(sk.count(), 1);
        assert!(m.get(sk.pixels().next().unwrap()));
    }

    #[test]
    fn thick_diagonal_stays_connected() {
        let m = BinaryMask::from_ascii(&["##.....", "###....", ".###...", "..###..", "...###.", "....##."]);
        let sk = thin(&m);
        assert_eq!(sk.as_mask().count_components8(), 1);
        assert!(!sk.as_mask().has_full_2x2_block());
    }

    fn arb_mask() -> impl Strategy<Value = BinaryMask> {
        (1usize..24, 1usize..24, 0.2f64..0.95, any::<u64>()).prop_map(|(w, h, p, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            BinaryMask::from_bits(w, h, (0..w * h).map(|_| rng.gen_bool(p)).collect()).unwrap()
        })
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn skeleton_invariants_hold(m in arb_mask()) {
            let sk = thin(&m);
            prop_assert!(!sk.as_mask().has_full_2x2_block());
            prop_assert_eq!(sk.as_mask().count_components8(), m.count_components8());
            prop_assert!(sk.pixels().all(|p| m.get(p)));
            prop_assert_eq!(thin(sk.as_mask()), sk);
        }
    }
}
