//! End-to-end traversal of the repaired skeleton, crossing order and mask
//! rendering.

mod order;
mod render;

use std::collections::HashSet;

use serde::Serialize;

pub use order::{determine_crossing_order, strand_samples, strand_score, CrossingRecord};
pub use render::{median_filter, render_instance, render_masks, sample_radii, DloInstance, MIN_RADIUS, RADIUS_BIAS};

use crate::error::{Error, Result};
use crate::intersections::Repair;
use crate::raster::Px;
use crate::walk::{next_step, Step};

/// One traversal of a through-path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Passage {
    pub intersection: usize,
    pub strand: usize,
}

/// Ordered centerline of one DLO.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CenterlinePath {
    pub pixels: Vec<Px>,
    /// Per-pixel radius; empty until sampled.
    pub radii: Vec<f64>,
    /// Closed loop traced from an arbitrary pixel.
    pub cyclic: bool,
    pub passages: Vec<Passage>,
}

impl CenterlinePath {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TraceOptions {
    /// Trace closed loops that hold no end instead of failing.
    pub allow_cycles: bool,
}

struct Tracer<'a> {
    repair: &'a Repair,
    generated: std::collections::HashMap<Px, (usize, usize)>,
    interior: HashSet<Px>,
    visited: HashSet<Px>,
    used: HashSet<(usize, usize)>,
}

impl<'a> Tracer<'a> {
    fn new(repair: &'a Repair) -> Self {
        Self {
            repair,
            generated: repair.generated_index(),
            interior: repair.patch_interior().into_iter().collect(),
            visited: HashSet::new(),
            used: HashSet::new(),
        }
    }

    /// Follows the skeleton from `path` (already holding its first pixels)
    /// until it ends, jumping across patches through their precomputed strands.
    fn run(&mut self, mut path: CenterlinePath, mut via_strand: bool) -> Result<CenterlinePath> {
        let sk = &self.repair.skeleton;
        for p in &path.pixels {
            self.visited.insert(*p);
        }
        loop {
            let cur = *path.pixels.last().expect("nonempty");
            if !via_strand {
                if let Some(&(i, k)) = self.generated.get(&cur) {
                    let inter = &self.repair.intersections[i];
                    let s = inter
                        .strand_of(k)
                        .ok_or_else(|| Error::topology(cur, "generated end without a strand"))?;
                    if self.used.insert((i, s)) {
                        let strand = &inter.through_paths[s];
                        path.pixels.extend(strand.entered_from(k).into_iter().skip(1));
                        path.passages.push(Passage {
                            intersection: i,
                            strand: s,
                        });
                        match strand.exit_for(k) {
                            None => return Ok(path),
                            Some(far) => {
                                let exit = inter.generated_ends[far];
                                self.visited.insert(exit);
                                via_strand = true;
                                continue;
                            }
                        }
                    }
                }
            }
            let (visited, interior) = (&self.visited, &self.interior);
            match next_step(sk, cur, |q| visited.contains(&q) || interior.contains(&q)) {
                Step::Stop => return Ok(path),
                Step::Next(q) => {
                    path.pixels.push(q);
                    self.visited.insert(q);
                    via_strand = false;
                }
                Step::Fork(c) => {
                    return Err(Error::topology(cur, format!("{} unvisited continuations", c.len())));
                }
            }
        }
    }

    fn trace_end(&mut self, end: Px) -> Result<CenterlinePath> {
        let path = CenterlinePath {
            pixels: vec![end],
            radii: Vec::new(),
            cyclic: false,
            passages: Vec::new(),
        };
        self.run(path, false)
    }

    /// Starts a closed loop at `p`, leaving along its smallest open neighbor.
    fn trace_loop(&mut self, p: Px) -> Result<CenterlinePath> {
        let sk = &self.repair.skeleton;
        let mut pixels = vec![p];
        if let Some(n) = p
            .neighbors8()
            .filter(|q| sk.contains(*q) && !self.visited.contains(q) && !self.interior.contains(q))
            .min()
        {
            pixels.push(n);
        }
        let path = CenterlinePath {
            pixels,
            radii: Vec::new(),
            cyclic: true,
            passages: Vec::new(),
        };
        self.run(path, false)
    }
}

/// Traces every DLO: ends are consumed in sorted order, each trace running
/// until it reaches another end.
pub fn trace_all(repair: &Repair, opts: TraceOptions) -> Result<Vec<CenterlinePath>> {
    let mut t = Tracer::new(repair);
    let mut paths = Vec::new();
    for &end in &repair.ends {
        if t.visited.contains(&end) {
            continue;
        }
        paths.push(t.trace_end(end)?);
    }
    loop {
        let (visited, interior) = (&t.visited, &t.interior);
        let Some(p) = repair
            .skeleton
            .pixels()
            .find(|p| !visited.contains(p) && !interior.contains(p))
        else {
            break;
        };
        if !opts.allow_cycles {
            return Err(Error::DisconnectedCycle { at: p });
        }
        paths.push(t.trace_loop(p)?);
    }
    Ok(paths)
}

/// Traces a single path starting at `end`, as `trace_all` would if `end`
/// were the first end popped.
pub fn trace_from(repair: &Repair, end: Px) -> Result<CenterlinePath> {
    Tracer::new(repair).trace_end(end)
}
