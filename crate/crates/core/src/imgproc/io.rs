//! PNG/PGM decoding and PNG encoding. Encoders return bytes so callers can
//! write them atomically with [`write_atomic`].

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RgbImage};

/// Opens an image file; failures to read the file surface as I/O errors.
fn open(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::Io(io),
        other => Error::Image(other),
    })
}

/// Decodes a PNG (8-bit RGB/RGBA, alpha dropped; gray is expanded) or a PNM file.
pub fn read_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    let img = open(path.as_ref())?;
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    RgbImage::from_raw(w as usize, h as usize, rgb.into_raw())
}

/// Decodes a mask image; luma above 127 is foreground.
pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let img = open(path.as_ref())?;
    Ok(mask_from_dynamic(&img))
}

pub fn decode_mask(bytes: &[u8]) -> Result<BinaryMask> {
    let img = image::load_from_memory(bytes)?;
    Ok(mask_from_dynamic(&img))
}

fn mask_from_dynamic(img: &DynamicImage) -> BinaryMask {
    let luma = img.to_luma8();
    let (w, h) = luma.dimensions();
    let bits = luma.into_raw().into_iter().map(|v| v > 127).collect();
    BinaryMask::from_bits(w as usize, h as usize, bits).expect("decoded dims")
}

pub fn encode_rgb_png(img: &RgbImage) -> Result<Vec<u8>> {
    let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, img.as_raw().to_vec())
        .ok_or_else(|| Error::Config("image buffer size mismatch".into()))?;
    let mut out = Vec::new();
    DynamicImage::ImageRgb8(buf).write_to(&mut Cursor::new(&mut out), ImageFormat::Png)?;
    Ok(out)
}

/// 8-bit grayscale PNG, foreground 255.
pub fn encode_mask_png(mask: &BinaryMask) -> Result<Vec<u8>> {
    let data = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let buf = image::GrayImage::from_raw(mask.width() as u32, mask.height() as u32, data)
        .ok_or_else(|| Error::Config("mask buffer size mismatch".into()))?;
    let mut out = Vec::new();
    DynamicImage::ImageLuma8(buf).write_to(&mut Cursor::new(&mut out), ImageFormat::Png)?;
    Ok(out)
}

/// Palette PNG where each byte of `labels` indexes `palette`.
pub fn encode_indexed_png(width: usize, height: usize, labels: &[u8], palette: &[[u8; 3]]) -> Result<Vec<u8>> {
    if labels.len() != width * height {
        return Err(Error::DimensionMismatch {
            expected: (width, height),
            found: (labels.len(), 1),
        });
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(png::ColorType::Indexed);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_palette(palette.iter().flatten().copied().collect::<Vec<u8>>());
        let mut writer = enc.write_header().map_err(png_err)?;
        writer.write_image_data(labels).map_err(png_err)?;
    }
    Ok(out)
}

fn png_err(e: png::EncodingError) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Px;

    #[test]
    fn mask_png_roundtrip() {
        let mut m = BinaryMask::new(7, 4);
        m.set(Px::new(1, 2), true);
        m.set(Px::new(6, 0), true);
        let bytes = encode_mask_png(&m).unwrap();
        assert_eq!(decode_mask(&bytes).unwrap(), m);
    }

    #[test]
    fn reads_rgba_and_pgm() {
        let dir = tempfile::tempdir().unwrap();
        let rgba = image::RgbaImage::from_pixel(3, 2, image::Rgba([10, 20, 30, 0]));
        let p = dir.path().join("a.png");
        rgba.save(&p).unwrap();
        let img = read_rgb(&p).unwrap();
        assert_eq!(img.get(Px::new(2, 1)), [10, 20, 30]);

        let pgm = dir.path().join("m.pgm");
        std::fs::write(&pgm, b"P5\n3 1\n255\n\x00\xff\x80").unwrap();
        let m = read_mask(&pgm).unwrap();
        assert_eq!(m.bits(), &[false, true, true]);
    }

    #[test]
    fn indexed_png_decodes() {
        let labels = [0u8, 1, 2, 1];
        let bytes = encode_indexed_png(2, 2, &labels, &[[0, 0, 0], [255, 0, 0], [0, 255, 0]]).unwrap();
        let img = image::load_from_memory(&bytes).unwrap().to_rgb8();
        assert_eq!(img.get_pixel(1, 0).0, [255, 0, 0]);
        assert_eq!(img.get_pixel(0, 1).0, [0, 255, 0]);
    }

    #[test]
    fn atomic_write_replaces_target() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
