//! Seeded synthetic scenes: smooth constant-radius strokes in distinct
//! saturated colors on a black background, with exact instance masks,
//! centerlines and draw order. A stroke's mask is the union of disks on its
//! rasterized centerline, so the centerline and radius reproduce it exactly.
//!
//! Scenes are kept in the regime the tracer is built for. Candidate strokes
//! are rejected when they cross at a shallow angle, touch without crossing,
//! put an end close to another stroke, pack crossings close together, or
//! leave the image.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use dlo_core::raster::stamp_disk;
use dlo_core::{BinaryMask, Px, RgbImage};

use crate::error::{EvalError, Result};

/// Stroke radius range, in pixels.
pub const RADIUS_RANGE: (f64, f64) = (4.0, 10.0);
/// Smallest accepted crossing angle, degrees.
pub const MIN_CROSSING_ANGLE: f64 = 35.0;
/// Hue spacing of the color palette, degrees.
pub const HUE_STEP: f64 = 30.0;
/// Per-channel noise amplitude on stroke pixels.
pub const NOISE: i32 = 6;

const SPACING: f64 = 0.25;
const WAYPOINT_STEP: f64 = 45.0;
const CONTACT_GAP: f64 = 6.0;
const END_GAP: f64 = 15.0;
const CROSSING_GAP: f64 = 30.0;
const LOOP_SLACK: f64 = 10.0;
const TRIES_PER_DLO: usize = 200;
const SCENE_RESTARTS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneParams {
    pub seed: u64,
    pub n_dlos: usize,
    pub width: usize,
    pub height: usize,
    /// Largest heading change between waypoints, radians.
    pub curvature_scale: f64,
}

impl SceneParams {
    pub fn new(seed: u64, n_dlos: usize, width: usize, height: usize) -> Self {
        Self {
            seed,
            n_dlos,
            width,
            height,
            curvature_scale: 0.6,
        }
    }
}

/// A crossing in the ground truth. `upper` was drawn after `lower`; for a
/// self-crossing both are the same DLO.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtCrossing {
    pub point: [f64; 2],
    pub lower: usize,
    pub upper: usize,
    pub angle_deg: f64,
}

impl GtCrossing {
    pub fn is_self(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticDlo {
    pub radius: f64,
    pub color: [u8; 3],
    /// Ordered 8-connected centerline pixels.
    pub centerline: Vec<Px>,
    pub mask: BinaryMask,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticScene {
    pub params: SceneParams,
    pub image: RgbImage,
    /// In draw order: a later DLO lies on top of earlier ones.
    pub dlos: Vec<SyntheticDlo>,
    pub crossings: Vec<GtCrossing>,
}

impl SyntheticScene {
    /// Union of the instance masks.
    pub fn foreground(&self) -> BinaryMask {
        let mut m = BinaryMask::new(self.params.width, self.params.height);
        for d in &self.dlos {
            m.union_with(&d.mask).expect("same dims");
        }
        m
    }

    pub fn draw_order(&self) -> Vec<usize> {
        (0..self.dlos.len()).collect()
    }
}

type P2 = [f64; 2];

fn catmull_rom(p0: P2, p1: P2, p2: P2, p3: P2, t: f64) -> P2 {
    let (t2, t3) = (t * t, t * t * t);
    std::array::from_fn(|k| {
        0.5 * (2.0 * p1[k]
            + (-p0[k] + p2[k]) * t
            + (2.0 * p0[k] - 5.0 * p1[k] + 4.0 * p2[k] - p3[k]) * t2
            + (-p0[k] + 3.0 * p1[k] - 3.0 * p2[k] + p3[k]) * t3)
    })
}

/// Interpolating spline through `way`, resampled at uniform arc length.
fn spline(way: &[P2], spacing: f64) -> Vec<P2> {
    let n = way.len();
    let at = |i: isize| way[i.clamp(0, n as isize - 1) as usize];
    let mut fine = Vec::new();
    for i in 0..n as isize - 1 {
        for k in 0..32 {
            fine.push(catmull_rom(at(i - 1), at(i), at(i + 1), at(i + 2), f64::from(k) / 32.0));
        }
    }
    fine.push(way[n - 1]);

    let mut out = vec![fine[0]];
    let mut carry = 0.0;
    for w in fine.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let mut s = spacing - carry;
        while s <= len {
            let t = s / len;
            out.push([a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]);
            s += spacing;
        }
        carry = len - (s - spacing);
    }
    out
}

fn random_walk(rng: &mut ChaCha8Rng, w: f64, h: f64, margin: f64, turn: f64) -> Vec<P2> {
    let mut p = [rng.gen_range(margin..w - margin), rng.gen_range(margin..h - margin)];
    let mut heading: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let steps = rng.gen_range(8..16);
    let mut way = vec![p];
    for _ in 0..steps {
        heading += rng.gen_range(-turn..=turn);
        let mut q = [
            p[0] + WAYPOINT_STEP * heading.cos(),
            p[1] + WAYPOINT_STEP * heading.sin(),
        ];
        if q[0] < margin || q[0] > w - margin {
            heading = std::f64::consts::PI - heading;
        }
        if q[1] < margin || q[1] > h - margin {
            heading = -heading;
        }
        q = [
            p[0] + WAYPOINT_STEP * heading.cos(),
            p[1] + WAYPOINT_STEP * heading.sin(),
        ];
        q = [q[0].clamp(margin, w - margin), q[1].clamp(margin, h - margin)];
        way.push(q);
        p = q;
    }
    way
}

/// A candidate stroke: dense samples plus the 1-px subsampling used for
/// geometric checks.
#[derive(Clone, Debug)]
struct Stroke {
    radius: f64,
    dense: Vec<P2>,
    pts: Vec<P2>,
}

impl Stroke {
    fn tangent(&self, s: usize) -> P2 {
        let a = self.pts[s.saturating_sub(3)];
        let b = self.pts[(s + 3).min(self.pts.len() - 1)];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let n = dx.hypot(dy).max(1e-12);
        [dx / n, dy / n]
    }

    fn arc_sep(&self) -> f64 {
        3.0 * (2.0 * self.radius + CONTACT_GAP)
    }
}

#[derive(Clone, Copy, Debug)]
struct Crossing {
    point: P2,
    a: usize,
    sa: usize,
    b: usize,
    sb: usize,
    sin: f64,
}

impl Crossing {
    /// Half-extent of the overlap of the two strokes along either one.
    fn footprint(&self, strokes: &[Stroke]) -> f64 {
        (strokes[self.a].radius + strokes[self.b].radius) / self.sin
    }
}

fn dist(a: P2, b: P2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn segment_hit(p: P2, p2: P2, q: P2, q2: P2) -> Option<P2> {
    let r = [p2[0] - p[0], p2[1] - p[1]];
    let s = [q2[0] - q[0], q2[1] - q[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    if den.abs() < 1e-12 {
        return None;
    }
    let qp = [q[0] - p[0], q[1] - p[1]];
    let t = (qp[0] * s[1] - qp[1] * s[0]) / den;
    let u = (qp[0] * r[1] - qp[1] * r[0]) / den;
    ((0.0..1.0).contains(&t) && (0.0..1.0).contains(&u)).then(|| [p[0] + t * r[0], p[1] + t * r[1]])
}

/// Spatial hash over stroke sample points.
struct Grid {
    cell: f64,
    map: std::collections::HashMap<(i64, i64), Vec<(usize, usize)>>,
}

impl Grid {
    fn new(strokes: &[Stroke], cell: f64) -> Self {
        let mut map: std::collections::HashMap<(i64, i64), Vec<(usize, usize)>> = Default::default();
        for (i, st) in strokes.iter().enumerate() {
            for (s, p) in st.pts.iter().enumerate() {
                map.entry(Self::key(*p, cell)).or_default().push((i, s));
            }
        }
        Self { cell, map }
    }

    fn key(p: P2, cell: f64) -> (i64, i64) {
        ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
    }

    /// Sample points within one cell of `p`.
    fn near(&self, p: P2) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (cx, cy) = Self::key(p, self.cell);
        (-1..=1)
            .flat_map(move |dy| (-1..=1).map(move |dx| (cx + dx, cy + dy)))
            .filter_map(|k| self.map.get(&k))
            .flatten()
            .copied()
    }
}

fn find_crossings(strokes: &[Stroke], grid: &Grid) -> Vec<Crossing> {
    let mut out: Vec<Crossing> = Vec::new();
    for (a, sa_stroke) in strokes.iter().enumerate() {
        for sa in 0..sa_stroke.pts.len() - 1 {
            let (p, p2) = (sa_stroke.pts[sa], sa_stroke.pts[sa + 1]);
            for (b, sb) in grid.near(p) {
                if b < a || sb + 1 >= strokes[b].pts.len() {
                    continue;
                }
                if b == a && (sb as f64) < sa as f64 + sa_stroke.arc_sep() {
                    continue;
                }
                let Some(x) = segment_hit(p, p2, strokes[b].pts[sb], strokes[b].pts[sb + 1]) else {
                    continue;
                };
                if out.iter().any(|c| c.a == a && c.b == b && dist(c.point, x) < 3.0) {
                    continue;
                }
                let (ta, tb) = (sa_stroke.tangent(sa), strokes[b].tangent(sb));
                let sin = (ta[0] * tb[1] - ta[1] * tb[0]).abs();
                out.push(Crossing {
                    point: x,
                    a,
                    sa,
                    b,
                    sb,
                    sin,
                });
            }
        }
    }
    out
}

/// Checks the whole set of strokes; `None` if any rule is broken.
fn validate(strokes: &[Stroke], w: f64, h: f64) -> Option<Vec<Crossing>> {
    let r_max = strokes.iter().map(|s| s.radius).fold(0.0, f64::max);
    for st in strokes {
        let m = st.radius + 3.0;
        if st
            .dense
            .iter()
            .any(|p| p[0] < m || p[1] < m || p[0] > w - 1.0 - m || p[1] > h - 1.0 - m)
        {
            return None;
        }
    }
    let grid = Grid::new(strokes, 2.0 * r_max + END_GAP + 2.0);
    let crossings = find_crossings(strokes, &grid);
    let min_sin = MIN_CROSSING_ANGLE.to_radians().sin();
    if crossings.iter().any(|c| c.sin < min_sin) {
        return None;
    }
    // a self-loop shorter than this could fold shut inside the windows the
    // contact check exempts
    for c in crossings.iter().filter(|c| c.a == c.b) {
        let st = &strokes[c.a];
        let win = (2.0 * st.radius + CONTACT_GAP) / c.sin + 3.0;
        if (c.sb as f64 - c.sa as f64).abs() < 2.0 * win + st.arc_sep() + LOOP_SLACK {
            return None;
        }
    }
    for (k, c1) in crossings.iter().enumerate() {
        for c2 in &crossings[k + 1..] {
            let need = c1.footprint(strokes) + c2.footprint(strokes) + CROSSING_GAP;
            if dist(c1.point, c2.point) < need {
                return None;
            }
        }
    }

    // near contacts must belong to a crossing
    for (a, st) in strokes.iter().enumerate() {
        for (sa, &p) in st.pts.iter().enumerate() {
            for (b, sb) in grid.near(p) {
                if b < a || (b == a && (sb as f64) <= sa as f64 + st.arc_sep()) {
                    continue;
                }
                let limit = st.radius + strokes[b].radius + CONTACT_GAP;
                if dist(p, strokes[b].pts[sb]) >= limit {
                    continue;
                }
                let explained = crossings.iter().any(|c| {
                    let win = limit / c.sin + 3.0;
                    c.a == a
                        && c.b == b
                        && (sa as f64 - c.sa as f64).abs() <= win
                        && (sb as f64 - c.sb as f64).abs() <= win
                });
                if !explained {
                    return None;
                }
            }
        }
    }

    // ends stay clear of other strokes and of crossings
    for (a, st) in strokes.iter().enumerate() {
        let last = st.pts.len() - 1;
        for (se, e) in [(0, st.pts[0]), (last, st.pts[last])] {
            for (b, sb) in grid.near(e) {
                if b == a && (sb as f64 - se as f64).abs() <= st.arc_sep() {
                    continue;
                }
                if dist(e, strokes[b].pts[sb]) < st.radius + strokes[b].radius + END_GAP {
                    return None;
                }
            }
            for c in &crossings {
                if dist(e, c.point) < c.footprint(strokes) + 2.0 * st.radius + END_GAP {
                    return None;
                }
            }
        }
    }
    Some(crossings)
}

fn candidate(rng: &mut ChaCha8Rng, p: &SceneParams) -> Stroke {
    let radius = rng.gen_range(RADIUS_RANGE.0..=RADIUS_RANGE.1);
    let margin = radius + 20.0;
    let way = random_walk(rng, p.width as f64, p.height as f64, margin, p.curvature_scale);
    let dense = spline(&way, SPACING);
    let step = (1.0 / SPACING).round() as usize;
    let pts = dense.iter().step_by(step).copied().collect();
    Stroke { radius, dense, pts }
}

/// Ordered centerline pixels from the dense samples.
fn centerline_pixels(dense: &[P2]) -> Vec<Px> {
    let mut out: Vec<Px> = Vec::new();
    for p in dense {
        let q = Px::new(p[0].round() as i32, p[1].round() as i32);
        if out.last() != Some(&q) {
            out.push(q);
        }
    }
    out
}

/// Union of disks of `radius` centered on the centerline pixels.
fn stroke_mask(centerline: &[Px], radius: f64, width: usize, height: usize) -> BinaryMask {
    let mut m = BinaryMask::new(width, height);
    for &p in centerline {
        stamp_disk(&mut m, p, radius);
    }
    m
}

fn palette_color(index: usize) -> [u8; 3] {
    dlo_core::imgproc::Hsv {
        h: index as f64 * HUE_STEP,
        s: 1.0,
        v: 0.9,
    }
    .to_rgb()
}

pub fn generate_scene(params: &SceneParams) -> Result<SyntheticScene> {
    if params.n_dlos == 0 {
        return Err(EvalError::Params("need at least one DLO".into()));
    }
    if params.width < 128 || params.height < 128 {
        return Err(EvalError::Params("image must be at least 128x128".into()));
    }
    let n_colors = (360.0 / HUE_STEP) as usize;
    if params.n_dlos > n_colors {
        return Err(EvalError::Params(format!("at most {n_colors} DLOs")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (w, h) = (params.width as f64, params.height as f64);

    for _ in 0..SCENE_RESTARTS {
        let mut strokes: Vec<Stroke> = Vec::new();
        let mut crossings = Vec::new();
        for _ in 0..params.n_dlos {
            let mut placed = false;
            for _ in 0..TRIES_PER_DLO {
                strokes.push(candidate(&mut rng, params));
                if let Some(c) = validate(&strokes, w, h) {
                    crossings = c;
                    placed = true;
                    break;
                }
                strokes.pop();
            }
            if !placed {
                break;
            }
        }
        if strokes.len() == params.n_dlos {
            return Ok(render(params, &strokes, &crossings, &mut rng));
        }
    }
    Err(EvalError::Generation {
        n_dlos: params.n_dlos,
        attempts: SCENE_RESTARTS,
    })
}

fn render(params: &SceneParams, strokes: &[Stroke], crossings: &[Crossing], rng: &mut ChaCha8Rng) -> SyntheticScene {
    let n_colors = (360.0 / HUE_STEP) as usize;
    let mut hues: Vec<usize> = (0..n_colors).collect();
    // partial Fisher-Yates: the first n entries are distinct random hues
    for i in 0..strokes.len() {
        let j = rng.gen_range(i..n_colors);
        hues.swap(i, j);
    }

    let mut image = RgbImage::new(params.width, params.height);
    let mut dlos = Vec::with_capacity(strokes.len());
    for (k, st) in strokes.iter().enumerate() {
        let color = palette_color(hues[k]);
        let centerline = centerline_pixels(&st.dense);
        let mask = stroke_mask(&centerline, st.radius, params.width, params.height);
        for p in mask.iter_foreground() {
            let c = color.map(|v| (i32::from(v) + rng.gen_range(-NOISE..=NOISE)).clamp(1, 255) as u8);
            image.put(p, c);
        }
        dlos.push(SyntheticDlo {
            radius: st.radius,
            color,
            centerline,
            mask,
        });
    }
    let crossings = crossings
        .iter()
        .map(|c| GtCrossing {
            point: c.point,
            lower: c.a.min(c.b),
            upper: c.a.max(c.b),
            angle_deg: c.sin.clamp(-1.0, 1.0).asin().to_degrees(),
        })
        .collect();
    SyntheticScene {
        params: *params,
        image,
        dlos,
        crossings,
    }
}

/// Scene size used for the benchmark tiers.
pub const TIER_SIZE: (usize, usize) = (896, 672);

/// Tier `t` holds scenes with `t` DLOs.
pub fn tier_params(tier: usize, base_seed: u64, index: usize) -> SceneParams {
    let seed = base_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((tier as u64) << 40)
        .wrapping_add(index as u64);
    SceneParams::new(seed, tier, TIER_SIZE.0, TIER_SIZE.1)
}
