//! Scene bundles on disk.
//!
//! ```text
//! <dir>/scene.png
//! <dir>/gt_instance_<k>.png
//! <dir>/gt_centerline_<k>.json
//! <dir>/meta.json
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dlo_core::imgproc::io::{encode_mask_png, encode_rgb_png, read_mask, read_rgb, write_atomic};
use dlo_core::{Px, RgbImage};

use crate::error::{EvalError, Result};
use crate::generator::{GtCrossing, SceneParams, SyntheticDlo, SyntheticScene};

pub const BUNDLE_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Meta {
    schema: u32,
    params: SceneParams,
    draw_order: Vec<usize>,
    colors: Vec<[u8; 3]>,
    crossings: Vec<GtCrossing>,
}

#[derive(Serialize, Deserialize)]
struct Centerline {
    id: usize,
    radius: f64,
    points: Vec<Px>,
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

pub fn write_bundle(dir: &Path, scene: &SyntheticScene) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_atomic(dir.join("scene.png"), &encode_rgb_png(&scene.image)?)?;
    for (k, d) in scene.dlos.iter().enumerate() {
        write_atomic(dir.join(format!("gt_instance_{k}.png")), &encode_mask_png(&d.mask)?)?;
        let c = Centerline {
            id: k,
            radius: d.radius,
            points: d.centerline.clone(),
        };
        write_atomic(dir.join(format!("gt_centerline_{k}.json")), &json_bytes(&c)?)?;
    }
    let meta = Meta {
        schema: BUNDLE_SCHEMA,
        params: scene.params,
        draw_order: scene.draw_order(),
        colors: scene.dlos.iter().map(|d| d.color).collect(),
        crossings: scene.crossings.clone(),
    };
    write_atomic(dir.join("meta.json"), &json_bytes(&meta)?)?;
    Ok(())
}

/// A scene image with its ground truth when the bundle has one.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub dir: PathBuf,
    pub image: RgbImage,
    pub truth: Option<SyntheticScene>,
}

fn bundle_err(dir: &Path, detail: impl Into<String>) -> EvalError {
    EvalError::Bundle {
        path: dir.to_path_buf(),
        detail: detail.into(),
    }
}

pub fn read_bundle(dir: &Path) -> Result<Bundle> {
    let image = read_rgb(dir.join("scene.png"))?;
    let meta_path = dir.join("meta.json");
    if !meta_path.exists() {
        return Ok(Bundle {
            dir: dir.to_path_buf(),
            image,
            truth: None,
        });
    }
    let meta: Meta = serde_json::from_slice(&std::fs::read(&meta_path)?)?;
    let mut dlos = Vec::new();
    for k in 0..meta.draw_order.len() {
        let mask_path = dir.join(format!("gt_instance_{k}.png"));
        let line_path = dir.join(format!("gt_centerline_{k}.json"));
        if !mask_path.exists() || !line_path.exists() {
            return Ok(Bundle {
                dir: dir.to_path_buf(),
                image,
                truth: None,
            });
        }
        let mask = read_mask(&mask_path)?;
        if mask.dims() != image.dims() {
            return Err(bundle_err(
                dir,
                format!("{} does not match scene size", mask_path.display()),
            ));
        }
        let c: Centerline = serde_json::from_slice(&std::fs::read(&line_path)?)?;
        dlos.push(SyntheticDlo {
            radius: c.radius,
            color: meta.colors.get(k).copied().unwrap_or_default(),
            centerline: c.points,
            mask,
        });
    }
    Ok(Bundle {
        dir: dir.to_path_buf(),
        image,
        truth: Some(SyntheticScene {
            params: meta.params,
            image: RgbImage::new(0, 0),
            dlos,
            crossings: meta.crossings,
        }),
    })
}

/// Bundle directories directly under `root`, sorted by name.
pub fn list_bundles(root: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(root)? {
        let p = entry?.path();
        if p.is_dir() && p.join("scene.png").is_file() {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::generate_scene;

    #[test]
    fn roundtrip_keeps_ground_truth() {
        let scene = generate_scene(&SceneParams::new(12, 2, 480, 360)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let b = dir.path().join("s0");
        write_bundle(&b, &scene).unwrap();
        let back = read_bundle(&b).unwrap();
        assert_eq!(back.image, scene.image);
        let truth = back.truth.unwrap();
        assert_eq!(truth.dlos, scene.dlos);
        assert_eq!(truth.crossings, scene.crossings);
        assert_eq!(list_bundles(dir.path()).unwrap(), vec![b]);
    }

    #[test]
    fn missing_ground_truth_reads_image_only() {
        let scene = generate_scene(&SceneParams::new(12, 1, 480, 360)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_bundle(dir.path(), &scene).unwrap();
        std::fs::remove_file(dir.path().join("gt_instance_0.png")).unwrap();
        assert!(read_bundle(dir.path()).unwrap().truth.is_none());
    }
}
