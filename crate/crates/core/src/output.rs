//! Serialized artifacts: results JSON, label and instance images, overlay and
//! debug dumps.

use serde_json::{json, Value};

use crate::error::Result;
use crate::imgproc::io::{encode_indexed_png, encode_mask_png, encode_rgb_png};
use crate::imgproc::Hsv;
use crate::intersections::IntersectionDump;
use crate::pipeline::SceneResult;
use crate::raster::{Px, RgbImage};

/// Version of the results JSON layout.
pub const RESULTS_SCHEMA: u32 = 1;

/// Display color for instance `id`: hues spaced by the golden angle.
pub fn instance_color(id: usize) -> [u8; 3] {
    let h = (id as f64 * 137.507_764) % 360.0;
    Hsv { h, s: 0.85, v: 1.0 }.to_rgb()
}

/// Results document. Contains no timings, so identical inputs give
/// identical bytes.
pub fn results_json(source: &str, r: &SceneResult) -> Value {
    let instances: Vec<Value> = r
        .instances
        .iter()
        .map(|inst| {
            json!({
                "id": inst.id,
                "centerline": inst.centerline.pixels,
                "radii": inst.centerline.radii.iter().map(|v| (v * 1e6).round() / 1e6).collect::<Vec<_>>(),
                "cyclic": inst.centerline.cyclic,
                "mask_pixels": inst.mask.count(),
                "crossings": inst.crossings,
            })
        })
        .collect();
    let crossings: Vec<Value> = r
        .crossings
        .iter()
        .map(|c| {
            json!({
                "center": c.center,
                "instances": c.strands,
                "top": c.top,
            })
        })
        .collect();
    json!({
        "schema": RESULTS_SCHEMA,
        "source": source,
        "width": r.width,
        "height": r.height,
        "params": {
            "delta": r.params.delta,
            "epsilon": r.params.epsilon,
            "max_distance": (r.params.max_distance * 1e6).round() / 1e6,
        },
        "instances": instances,
        "crossings": crossings,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_bytes(v: &Value) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

/// Per-pixel instance labels (0 background, `id + 1` otherwise). At overlaps
/// the instance on top at a nearby crossing wins; elsewhere the higher id.
pub fn label_raster(r: &SceneResult) -> Vec<u8> {
    let dims = r.mask.dims();
    let mut labels = vec![0u8; dims.len()];
    let mut order: Vec<usize> = (0..r.instances.len()).collect();
    // instances that are on top at any crossing are painted last
    order.sort_by_key(|&i| (r.crossings.iter().filter(|c| c.top == i).count(), i));
    for i in order {
        let lab = u8::try_from(i + 1).unwrap_or(u8::MAX);
        for p in r.instances[i].mask.iter_foreground() {
            labels[dims.index(p)] = lab;
        }
    }
    labels
}

pub fn labels_png(r: &SceneResult) -> Result<Vec<u8>> {
    let n = r.instances.len().min(255);
    let mut palette = vec![[0u8, 0, 0]];
    palette.extend((0..n).map(instance_color));
    encode_indexed_png(r.width, r.height, &label_raster(r), &palette)
}

/// One grayscale PNG per instance.
pub fn instance_pngs(r: &SceneResult) -> Result<Vec<Vec<u8>>> {
    r.instances.iter().map(|i| encode_mask_png(&i.mask)).collect()
}

/// Instances blended over the input (or the mask, when there is no image)
/// with centerlines drawn in full color.
pub fn overlay(r: &SceneResult, base: Option<&RgbImage>) -> Result<Vec<u8>> {
    let dims = r.mask.dims();
    let mut img = match base {
        Some(b) => b.clone(),
        None => {
            let mut g = RgbImage::new(dims.width, dims.height);
            for p in r.mask.iter_foreground() {
                g.put(p, [90, 90, 90]);
            }
            g
        }
    };
    let labels = label_raster(r);
    for (k, &lab) in labels.iter().enumerate() {
        if lab == 0 {
            continue;
        }
        let p = dims.px(k);
        let c = instance_color(usize::from(lab) - 1);
        let o = img.get(p);
        img.put(
            p,
            std::array::from_fn(|i| ((u16::from(o[i]) + u16::from(c[i])) / 2) as u8),
        );
    }
    for inst in &r.instances {
        let c = instance_color(inst.id);
        for &p in &inst.centerline.pixels {
            img.put(p, c);
        }
    }
    for inter in &r.repair.intersections {
        mark(&mut img, inter.center, [255, 255, 255]);
    }
    encode_rgb_png(&img)
}

fn mark(img: &mut RgbImage, p: Px, c: [u8; 3]) {
    for dy in -1..=1 {
        for dx in -1..=1 {
            let q = p.offset(dx, dy);
            if img.dims().contains(q) {
                img.put(q, c);
            }
        }
    }
}

/// Pruned skeleton in white with ends red and intersection pixels green.
pub fn keypoints_png(r: &SceneResult) -> Result<Vec<u8>> {
    let mut img = RgbImage::new(r.width, r.height);
    for p in r.pruned_skeleton.pixels() {
        img.put(p, [255, 255, 255]);
    }
    for &p in &r.keypoints.ends {
        img.put(p, [255, 0, 0]);
    }
    for &p in &r.keypoints.intersections {
        img.put(p, [0, 255, 0]);
    }
    encode_rgb_png(&img)
}

/// Repaired skeleton in white, patches in yellow.
pub fn skeleton_png(r: &SceneResult) -> Result<Vec<u8>> {
    let mut img = RgbImage::new(r.width, r.height);
    for p in r.repair.skeleton.pixels() {
        img.put(p, [255, 255, 255]);
    }
    for p in r.repair.intersections.iter().flat_map(|i| i.patch_pixels()) {
        img.put(p, [255, 220, 0]);
    }
    encode_rgb_png(&img)
}

pub fn intersections_json(r: &SceneResult) -> Value {
    let dumps: Vec<IntersectionDump<'_>> = r.repair.intersections.iter().map(IntersectionDump::from).collect();
    json!({ "schema": RESULTS_SCHEMA, "intersections": dumps })
}
