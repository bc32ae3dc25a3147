//! Exact Euclidean distance transform by two separable lower-envelope passes
//! (Felzenszwalb & Huttenlocher). The image is surrounded by a virtual
//! one-pixel background frame, so foreground touching the border still gets
//! a finite distance.

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Dims, Px};

/// Per-pixel distance to the nearest background pixel; 0 on background.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMap {
    dims: Dims,
    values: Vec<f64>,
}

impl DistanceMap {
    /// Wraps precomputed values (row-major, nonnegative).
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                found: (values.len(), 1),
            });
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::Config("distance values must be nonnegative".into()));
        }
        Ok(Self {
            dims: Dims::new(width, height),
            values,
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

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Out-of-bounds reads return 0.
    pub fn get(&self, p: Px) -> f64 {
        if self.dims.contains(p) {
            self.values[self.dims.index(p)]
        } else {
            0.0
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

const FAR: f64 = 1e20;

/// Adds the parabola `(q - s)^2 + cost` to the lower envelope, dropping
/// parabolas it hides.
fn push_parabola(s: f64, cost: f64, sites: &mut Vec<f64>, bounds: &mut Vec<f64>, costs: &mut Vec<f64>) {
    if cost >= FAR {
        return;
    }
    while let (Some(&last_s), Some(&last_c), Some(&last_b)) = (sites.last(), costs.last(), bounds.last()) {
        let cross = ((cost + s * s) - (last_c + last_s * last_s)) / (2.0 * (s - last_s));
        if cross > last_b {
            sites.push(s);
            costs.push(cost);
            bounds.push(cross);
            return;
        }
        sites.pop();
        costs.pop();
        bounds.pop();
    }
    sites.push(s);
    costs.push(cost);
    bounds.push(f64::NEG_INFINITY);
}

/// Squared 1-D distance transform of `f` sampled on `0..n`, with implicit
/// zero-cost sites at `-1` and `n` (the virtual frame).
fn edt_1d(f: &[f64], out: &mut [f64], sites: &mut Vec<f64>, bounds: &mut Vec<f64>, costs: &mut Vec<f64>) {
    let n = f.len();
    sites.clear();
    bounds.clear();
    costs.clear();
    push_parabola(-1.0, 0.0, sites, bounds, costs);
    for (q, &v) in f.iter().enumerate() {
        push_parabola(q as f64, v, sites, bounds, costs);
    }
    push_parabola(n as f64, 0.0, sites, bounds, costs);

    let mut k = 0;
    for (q, slot) in out.iter_mut().enumerate() {
        let qf = q as f64;
        while k + 1 < sites.len() && bounds[k + 1] < qf {
            k += 1;
        }
        let d = qf - sites[k];
        *slot = d * d + costs[k];
    }
}

/// Exact L2 distance from every pixel to the nearest background pixel.
pub fn distance_transform(mask: &BinaryMask) -> DistanceMap {
    let dims = mask.dims();
    let (w, h) = (dims.width, dims.height);
    let bits = mask.bits();
    let mut col_pass = vec![0.0; w * h];

    let mut sites = Vec::new();
    let mut bounds = Vec::new();
    let mut costs = Vec::new();

    let mut column = vec![0.0; h];
    let mut column_out = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            column[y] = if bits[y * w + x] { FAR } else { 0.0 };
        }
        edt_1d(&column, &mut column_out, &mut sites, &mut bounds, &mut costs);
        for y in 0..h {
            col_pass[y * w + x] = column_out[y];
        }
    }

    let mut values = vec![0.0; w * h];
    let mut row_out = vec![0.0; w];
    for y in 0..h {
        let row = &col_pass[y * w..(y + 1) * w];
        edt_1d(row, &mut row_out, &mut sites, &mut bounds, &mut costs);
        for x in 0..w {
            values[y * w + x] = if bits[y * w + x] { row_out[x].sqrt() } else { 0.0 };
        }
    }
    DistanceMap { dims, values }
}
