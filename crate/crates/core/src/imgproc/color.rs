//! HSV band filtering for high-contrast scenes.
//!
//! A filter is a union of bands. Each band bounds hue in degrees, where
//! `h_min > h_max` denotes a range wrapping through 0°, and saturation and
//! value in `[0, 1]`.
//!
//! Filter configs are TOML documents with one `[[band]]` table per band:
//!
//! ```toml
//! [[band]]
//! h_min = 350
//! h_max = 10
//! s_min = 0.5
//! s_max = 1.0
//! v_min = 0.3
//! v_max = 1.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RgbImage};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsvBand {
    pub h_min: f64,
    pub h_max: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl HsvBand {
    fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        let in_hue = |h: f64| (0.0..=360.0).contains(&h);
        if !(in_hue(self.h_min) && in_hue(self.h_max)) {
            return Err(Error::Config(format!(
                "hue bounds must lie in [0, 360]: {} .. {}",
                self.h_min, self.h_max
            )));
        }
        if !(in_unit(self.s_min) && in_unit(self.s_max) && in_unit(self.v_min) && in_unit(self.v_max)) {
            return Err(Error::Config("saturation and value bounds must lie in [0, 1]".into()));
        }
        if self.s_min > self.s_max || self.v_min > self.v_max {
            return Err(Error::Config("empty saturation or value range".into()));
        }
        Ok(())
    }

    pub fn contains(&self, hsv: Hsv) -> bool {
        let hue_ok = if self.h_min <= self.h_max {
            hsv.h >= self.h_min && hsv.h <= self.h_max
        } else {
            hsv.h >= self.h_min || hsv.h <= self.h_max
        };
        hue_ok && hsv.s >= self.s_min && hsv.s <= self.s_max && hsv.v >= self.v_min && hsv.v <= self.v_max
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsvFilterSpec {
    #[serde(rename = "band")]
    bands: Vec<HsvBand>,
}

impl HsvFilterSpec {
    pub fn new(bands: Vec<HsvBand>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::Config("HSV filter needs at least one band".into()));
        }
        for band in &bands {
            band.validate()?;
        }
        Ok(Self { bands })
    }

    /// Any hue, saturation at least `s_min`, value at least `v_min`.
    pub fn saturated(s_min: f64, v_min: f64) -> Self {
        Self::new(vec![HsvBand {
            h_min: 0.0,
            h_max: 360.0,
            s_min,
            s_max: 1.0,
            v_min,
            v_max: 1.0,
        }])
        .expect("valid band")
    }

    pub fn bands(&self) -> &[HsvBand] {
        &self.bands
    }

    pub fn parse(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            band: Vec<HsvBand>,
        }
        let raw: Raw = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::new(raw.band)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_config_string(&self) -> String {
        toml::to_string(self).expect("bands serialize")
    }

    pub fn matches(&self, rgb: [u8; 3]) -> bool {
        let hsv = Hsv::from_rgb(rgb);
        self.bands.iter().any(|b| b.contains(hsv))
    }
}

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl Hsv {
    pub fn from_rgb([r, g, b]: [u8; 3]) -> Self {
        let (r, g, b) = (f64::from(r), f64::from(g), f64::from(b));
        let max = r.max(g).max(b);
        let min = r.min(g).min(b);
        let chroma = max - min;
        let v = max / 255.0;
        let s = if max > 0.0 { chroma / max } else { 0.0 };
        let h = if chroma == 0.0 {
            0.0
        } else if max == r {
            60.0 * ((g - b) / chroma).rem_euclid(6.0)
        } else if max == g {
            60.0 * ((b - r) / chroma + 2.0)
        } else {
            60.0 * ((r - g) / chroma + 4.0)
        };
        Self { h: h % 360.0, s, v }
    }

    pub fn to_rgb(self) -> [u8; 3] {
        let c = self.v * self.s;
        let hp = (self.h.rem_euclid(360.0)) / 60.0;
        let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
        let (r, g, b) = match hp as u32 {
            0 => (c, x, 0.0),
            1 => (x, c, 0.0),
            2 => (0.0, c, x),
            3 => (0.0, x, c),
            4 => (x, 0.0, c),
            _ => (c, 0.0, x),
        };
        let m = self.v - c;
        let q = |u: f64| ((u + m) * 255.0).round().clamp(0.0, 255.0) as u8;
        [q(r), q(g), q(b)]
    }
}

/// Foreground wherever the pixel's HSV value falls inside any band.
pub fn color_filter(image: &RgbImage, spec: &HsvFilterSpec) -> BinaryMask {
    let bits = image.pixels().map(|rgb| spec.matches(rgb)).collect();
    BinaryMask::from_bits(image.width(), image.height(), bits).expect("dims preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn band(h_min: f64, h_max: f64) -> HsvBand {
        HsvBand {
            h_min,
            h_max,
            s_min: 0.5,
            s_max: 1.0,
            v_min: 0.3,
            v_max: 1.0,
        }
    }

    #[test]
    fn all_inside_single_band() {
        let img = RgbImage::filled(8, 6, [20, 200, 30]);
        let spec = HsvFilterSpec::new(vec![band(90.0, 150.0)]).unwrap();
        assert_eq!(color_filter(&img, &spec).count(), 48);
    }

    #[test]
    fn all_outside_every_band() {
        let img = RgbImage::filled(8, 6, [20, 200, 30]);
        let spec = HsvFilterSpec::new(vec![band(200.0, 260.0), band(0.0, 40.0)]).unwrap();
        assert!(color_filter(&img, &spec).is_empty());
    }

    #[test]
    fn hue_wraps_through_zero() {
        let img = RgbImage::filled(4, 4, [255, 0, 0]);
        let spec = HsvFilterSpec::new(vec![band(350.0, 10.0)]).unwrap();
        assert_eq!(color_filter(&img, &spec).count(), 16);
        let magenta_red = RgbImage::filled(1, 1, [255, 0, 30]);
        assert_eq!(color_filter(&magenta_red, &spec).count(), 1);
        let green = RgbImage::filled(1, 1, [0, 255, 0]);
        assert!(color_filter(&green, &spec).is_empty());
    }

    #[test]
    fn empty_band_list_is_config_error() {
        assert!(matches!(HsvFilterSpec::new(vec![]), Err(Error::Config(_))));
        assert!(matches!(HsvFilterSpec::parse("# nothing\n"), Err(Error::Config(_))));
    }

    #[test]
    fn inverted_saturation_rejected() {
        let mut b = band(0.0, 360.0);
        b.s_min = 0.9;
        b.s_max = 0.1;
        assert!(HsvFilterSpec::new(vec![b]).is_err());
    }

    #[test]
    fn config_text_roundtrip() {
        let text = "[[band]]\nh_min = 350\nh_max = 10\ns_min = 0.5\ns_max = 1.0\nv_min = 0.3\nv_max = 1.0\n\n\
                    [[band]]\nh_min = 100.0\nh_max = 140.0\ns_min = 0.2\ns_max = 1.0\nv_min = 0.2\nv_max = 1.0\n";
        let spec = HsvFilterSpec::parse(text).unwrap();
        assert_eq!(spec.bands().len(), 2);
        assert_eq!(spec.bands()[0].h_min, 350.0);
        let again = HsvFilterSpec::parse(&spec.to_config_string()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn hsv_primary_colors() {
        let h = |rgb| Hsv::from_rgb(rgb).h;
        assert_eq!(h([255, 0, 0]), 0.0);
        assert_eq!(h([0, 255, 0]), 120.0);
        assert_eq!(h([0, 0, 255]), 240.0);
        assert_eq!(Hsv::from_rgb([0, 0, 0]).s, 0.0);
    }

    proptest! {
        #[test]
        fn hsv_roundtrip_close(r in 0u8.., g in 0u8.., b in 0u8..) {
            let back = Hsv::from_rgb([r, g, b]).to_rgb();
            for (x, y) in back.iter().zip([r, g, b]) {
                prop_assert!((i32::from(*x) - i32::from(y)).abs() <= 1);
            }
        }

        #[test]
        fn enlarging_a_band_never_removes_foreground(
            data in proptest::collection::vec(0u8.., 3 * 36),
            h_min in 0.0f64..360.0, h_max in 0.0f64..360.0,
            s_min in 0.0f64..1.0, v_min in 0.0f64..1.0,
            grow in 0.0f64..60.0, shrink_s in 0.0f64..0.5,
        ) {
            let img = RgbImage::from_raw(6, 6, data).unwrap();
            let small = HsvBand { h_min, h_max, s_min, s_max: 1.0, v_min, v_max: 1.0 };
            let wrapped = |h: f64| if h < 0.0 { h + 360.0 } else if h > 360.0 { h - 360.0 } else { h };
            // widen hue on both sides unless that would make the band cover everything twice
            let (gh_min, gh_max) = if grow * 2.0 + span(h_min, h_max) >= 360.0 {
                (0.0, 360.0)
            } else {
                (wrapped(h_min - grow), wrapped(h_max + grow))
            };
            let big = HsvBand { h_min: gh_min, h_max: gh_max, s_min: (s_min - shrink_s).max(0.0), s_max: 1.0, v_min: 0.0, v_max: 1.0 };
            let a = color_filter(&img, &HsvFilterSpec::new(vec![small]).unwrap());
            let b = color_filter(&img, &HsvFilterSpec::new(vec![big]).unwrap());
            for (x, y) in a.bits().iter().zip(b.bits()) {
                prop_assert!(!*x || *y);
            }
        }
    }

    fn span(h_min: f64, h_max: f64) -> f64 {
        if h_min <= h_max {
            h_max - h_min
        } else {
            360.0 - h_min + h_max
        }
    }
}
