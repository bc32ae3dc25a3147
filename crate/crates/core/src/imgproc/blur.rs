//! Separable 5x5 Gaussian blur (sigma 2) with edge replication.

use crate::raster::RgbImage;

pub const BLUR_RADIUS: usize = 2;
pub const BLUR_SIGMA: f64 = 2.0;

/// Normalized 1-D taps for offsets `-2..=2`.
pub fn gaussian_taps() -> [f32; 2 * BLUR_RADIUS + 1] {
    let mut taps = [0.0f64; 2 * BLUR_RADIUS + 1];
    for (i, t) in taps.iter_mut().enumerate() {
        let k = i as f64 - BLUR_RADIUS as f64;
        *t = (-k * k / (2.0 * BLUR_SIGMA * BLUR_SIGMA)).exp();
    }
    let sum: f64 = taps.iter().sum();
    taps.map(|t| (t / sum) as f32)
}

pub fn gaussian_blur(image: &RgbImage) -> RgbImage {
    let (w, h) = (image.width(), image.height());
    let taps = gaussian_taps();
    let src = image.as_raw();
    let r = BLUR_RADIUS as isize;

    let mut horizontal = vec![0.0f32; w * h * 3];
    for y in 0..h {
        let row = &src[y * w * 3..(y + 1) * w * 3];
        for x in 0..w {
            let mut acc = [0.0f32; 3];
            for (i, &t) in taps.iter().enumerate() {
                let sx = (x as isize + i as isize - r).clamp(0, w as isize - 1) as usize;
                for c in 0..3 {
                    acc[c] += t * f32::from(row[sx * 3 + c]);
                }
            }
            horizontal[(y * w + x) * 3..(y * w + x) * 3 + 3].copy_from_slice(&acc);
        }
    }

    let mut out = vec![0u8; w * h * 3];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f32; 3];
            for (i, &t) in taps.iter().enumerate() {
                let sy = (y as isize + i as isize - r).clamp(0, h as isize - 1) as usize;
                let base = (sy * w + x) * 3;
                for c in 0..3 {
                    acc[c] += t * horizontal[base + c];
                }
            }
            for c in 0..3 {
                out[(y * w + x) * 3 + c] = acc[c].round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    RgbImage::from_raw(w, h, out).expect("dims preserved")
}
