//! Raster containers shared by every stage: pixel coordinates, boolean
//! masks, RGB images and the 8-neighborhood helpers the skeleton walkers use.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer pixel coordinate. `x` grows rightwards, `y` grows downwards.
///
/// Serialized as a two-element `[x, y]` array.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Px {
    pub x: i32,
    pub y: i32,
}

impl Px {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    /// True for the eight surrounding pixels (a pixel is not its own neighbor).
    pub fn is_adjacent8(self, other: Px) -> bool {
        self != other && (self.x - other.x).abs() <= 1 && (self.y - other.y).abs() <= 1
    }

    pub fn is_adjacent4(self, other: Px) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }

    pub fn dist2(self, other: Px) -> i64 {
        let dx = i64::from(self.x - other.x);
        let dy = i64::from(self.y - other.y);
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Px) -> f64 {
        (self.dist2(other) as f64).sqrt()
    }

    pub fn neighbors8(self) -> impl Iterator<Item = Px> {
        NEIGHBORS8.iter().map(move |&(dx, dy)| self.offset(dx, dy))
    }
}

impl From<[i32; 2]> for Px {
    fn from([x, y]: [i32; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Px> for [i32; 2] {
    fn from(p: Px) -> Self {
        [p.x, p.y]
    }
}

/// Clockwise ring starting north: N, NE, E, SE, S, SW, W, NW.
pub const NEIGHBORS8: [(i32, i32); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

/// Width and height of a raster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
}

impl Dims {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub fn len(self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    pub fn contains(self, p: Px) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    /// Row-major index of an in-bounds pixel.
    pub fn index(self, p: Px) -> usize {
        p.y as usize * self.width + p.x as usize
    }

    pub fn px(self, index: usize) -> Px {
        Px::new((index % self.width) as i32, (index / self.width) as i32)
    }
}

/// Row-major boolean raster; `true` is foreground.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMask {
    dims: Dims,
    bits: Vec<bool>,
}

impl std::fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BinaryMask")
            .field("width", &self.dims.width)
            .field("height", &self.dims.height)
            .field("foreground", &self.count())
            .finish()
    }
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            dims: Dims::new(width, height),
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                found: (bits.len(), 1),
            });
        }
        Ok(Self {
            dims: Dims::new(width, height),
            bits,
        })
    }

    /// Builds a mask from an ASCII picture: `#` (or `1`) is foreground, anything
    /// else background. Rows must have equal length. Handy in tests.
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut mask = Self::new(width, height);
        for (y, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), width, "ragged ascii mask");
            for (x, c) in row.bytes().enumerate() {
                if c == b'#' || c == b'1' {
                    mask.set(Px::new(x as i32, y as i32), true);
                }
            }
        }
        mask
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Out-of-bounds coordinates read as background.
    pub fn get(&self, p: Px) -> bool {
        self.dims.contains(p) && self.bits[self.dims.index(p)]
    }

    /// Writes are ignored outside the raster.
    pub fn set(&mut self, p: Px, value: bool) {
        if self.dims.contains(p) {
            let i = self.dims.index(p);
            self.bits[i] = value;
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Foreground pixels in row-major order.
    pub fn iter_foreground(&self) -> impl Iterator<Item = Px> + '_ {
        let dims = self.dims;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| dims.px(i))
    }

    pub fn count_neighbors8(&self, p: Px) -> usize {
        p.neighbors8().filter(|&q| self.get(q)).count()
    }

    pub fn union_with(&mut self, other: &BinaryMask) -> Result<()> {
        self.check_same_dims(other)?;
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }

    pub fn intersection_count(&self, other: &BinaryMask) -> Result<usize> {
        self.check_same_dims(other)?;
        Ok(self.bits.iter().zip(&other.bits).filter(|(&a, &b)| a && b).count())
    }

    pub fn check_same_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: (self.width(), self.height()),
                found: (other.width(), other.height()),
            });
        }
        Ok(())
    }

    /// Number of 8-connected foreground components.
    pub fn count_components8(&self) -> usize {
        let mut seen = vec![false; self.bits.len()];
        let mut stack = Vec::new();
        let mut components = 0;
        for start in 0..self.bits.len() {
            if !self.bits[start] || seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let p = self.dims.px(i);
                for q in p.neighbors8() {
                    if self.get(q) {
                        let j = self.dims.index(q);
                        if !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        components
    }

    /// True if any 2x2 window is entirely foreground.
    pub fn has_full_2x2_block(&self) -> bool {
        let (w, h) = (self.width(), self.height());
        (1..h).any(|y| {
            (1..w).any(|x| {
                let i = y * w + x;
                self.bits[i] && self.bits[i - 1] && self.bits[i - w] && self.bits[i - w - 1]
            })
        })
    }
}

/// Row-major 8-bit RGB image.
#[derive(Clone, PartialEq, Eq)]
pub struct RgbImage {
    dims: Dims,
    data: Vec<u8>,
}

impl std::fmt::Debug for RgbImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RgbImage")
            .field("width", &self.dims.width)
            .field("height", &self.dims.height)
            .finish_non_exhaustive()
    }
}

impl RgbImage {
    /// Black image.
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            dims: Dims::new(width, height),
            data: vec![0; width * height * 3],
        }
    }

    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        let mut img = Self::new(width, height);
        for px in img.data.chunks_exact_mut(3) {
            px.copy_from_slice(&color);
        }
        img
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Config("image must be at least 1x1".into()));
        }
        if data.len() != width * height * 3 {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                found: (data.len() / 3, 1),
            });
        }
        Ok(Self {
            dims: Dims::new(width, height),
            data,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, p: Px) -> [u8; 3] {
        let i = self.dims.index(p) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn put(&mut self, p: Px, color: [u8; 3]) {
        if self.dims.contains(p) {
            let i = self.dims.index(p) * 3;
            self.data[i..i + 3].copy_from_slice(&color);
        }
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }
}

/// Pixels of the digital straight segment from `a` to `b` inclusive
/// (Bresenham). Consecutive pixels are 8-adjacent.
pub fn line_pixels(a: Px, b: Px) -> Vec<Px> {
    let dx = (b.x - a.x).abs();
    let dy = -(b.y - a.y).abs();
    let sx = if a.x < b.x { 1 } else { -1 };
    let sy = if a.y < b.y { 1 } else { -1 };
    let mut err = dx + dy;
    let mut p = a;
    let mut out = Vec::with_capacity((dx.max(-dy) + 1) as usize);
    loop {
        out.push(p);
        if p == b {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            p.x += sx;
        }
        if e2 <= dx {
            err += dx;
            p.y += sy;
        }
    }
    out
}

/// Marks every pixel whose center lies within `radius` (inclusive) of `center`.
pub fn stamp_disk(mask: &mut BinaryMask, center: Px, radius: f64) {
    let r2 = radius * radius + 1e-9;
    let reach = radius.floor() as i32;
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            if f64::from(dx * dx + dy * dy) <= r2 {
                mask.set(center.offset(dx, dy), true);
            }
        }
    }
}
