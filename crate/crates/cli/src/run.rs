use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use dlo_core::imgproc::io::{read_mask, read_rgb, write_atomic};
use dlo_core::imgproc::HsvFilterSpec;
use dlo_core::output::{
    instance_pngs, intersections_json, keypoints_png, labels_png, overlay, results_json, skeleton_png, to_json_bytes,
};
use dlo_core::tracer::TraceOptions;
use dlo_core::{run_pipeline, PipelineOptions, RgbImage, SceneInput};

use crate::args::RunArgs;
use crate::diag;
use crate::error::{CliError, Result, Status};

pub fn load_filter(path: &Path) -> Result<HsvFilterSpec> {
    HsvFilterSpec::load(path).map_err(|e| match e.kind() {
        "io" => CliError::io(path, e),
        _ => CliError::Core(e),
    })
}

/// Per-input subdirectory names; stems must be unique.
fn output_names(inputs: &[PathBuf]) -> Result<Vec<String>> {
    let mut seen = BTreeSet::new();
    let mut names = Vec::with_capacity(inputs.len());
    for p in inputs {
        let stem = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| CliError::Usage(format!("{} has no file name", p.display())))?;
        if !seen.insert(stem.clone()) {
            return Err(CliError::Usage(format!("two inputs share the file stem {stem:?}")));
        }
        names.push(stem);
    }
    Ok(names)
}

enum Mode<'a> {
    Rgb(&'a HsvFilterSpec),
    Mask(&'a [PathBuf]),
}

struct Job<'a> {
    input: &'a Path,
    index: usize,
    dir: PathBuf,
}

fn process(job: &Job<'_>, mode: &Mode<'_>, a: &RunArgs, opts: PipelineOptions) -> Result<usize> {
    let read = |p: &Path| read_rgb(p).map_err(|e| CliError::io(p, e));
    let (result, image): (_, Option<RgbImage>) = match mode {
        Mode::Rgb(filter) => {
            let image = read(job.input)?;
            (
                run_pipeline(SceneInput::Rgb { image: &image, filter }, opts),
                Some(image),
            )
        }
        Mode::Mask(images) => {
            let mask = read_mask(job.input).map_err(|e| CliError::io(job.input, e))?;
            let image = images.get(job.index).map(|p| read(p)).transpose()?;
            let input = SceneInput::Mask {
                mask: &mask,
                image: image.as_ref(),
            };
            (run_pipeline(input, opts), image)
        }
    };
    let r = result?;

    let write = |name: &str, bytes: &[u8]| {
        let p = job.dir.join(name);
        write_atomic(&p, bytes).map_err(|e| CliError::io(p, e))
    };
    std::fs::create_dir_all(&job.dir).map_err(|e| CliError::io(&job.dir, e))?;
    for (k, png) in instance_pngs(&r)?.iter().enumerate() {
        write(&format!("instance_{k}.png"), png)?;
    }
    write("labels.png", &labels_png(&r)?)?;
    if a.overlay {
        write("overlay.png", &overlay(&r, image.as_ref())?)?;
    }
    if a.debug_dumps {
        write("skeleton.png", &skeleton_png(&r)?)?;
        write("keypoints.png", &keypoints_png(&r)?)?;
        write("intersections.json", &to_json_bytes(&intersections_json(&r))?)?;
    }
    // written last: its presence marks a complete result
    let source = job.input.display().to_string();
    write("results.json", &to_json_bytes(&results_json(&source, &r))?)?;
    Ok(r.instances.len())
}

pub fn run(a: RunArgs) -> Result<Status> {
    let filter = match (&a.hsv_config, a.mask_input) {
        (Some(p), false) => Some(load_filter(p)?),
        (None, false) => {
            return Err(CliError::Usage(
                "RGB input needs --hsv-config (or pass --mask-input)".into(),
            ))
        }
        (_, true) => None,
    };
    if a.mask_input && !a.image.is_empty() && a.image.len() != a.inputs.len() {
        return Err(CliError::Usage(format!(
            "{} --image paths given for {} inputs",
            a.image.len(),
            a.inputs.len()
        )));
    }
    let names = output_names(&a.inputs)?;
    std::fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;

    let mode = match &filter {
        Some(f) => Mode::Rgb(f),
        None => Mode::Mask(&a.image),
    };
    let opts = PipelineOptions {
        trace: TraceOptions {
            allow_cycles: a.allow_cycles,
        },
    };
    let mut status = Status::Ok;
    for (index, (input, name)) in a.inputs.iter().zip(&names).enumerate() {
        let job = Job {
            input,
            index,
            dir: a.out.join(name),
        };
        match process(&job, &mode, &a, opts) {
            Ok(n) => println!("{} -> {}: {n} instances", input.display(), job.dir.display()),
            Err(e) => {
                diag::item_error(input, &e);
                status = worse(status, e.status());
            }
        }
    }
    Ok(status)
}

/// I/O problems outrank per-image pipeline failures.
pub fn worse(a: Status, b: Status) -> Status {
    let rank = |s: Status| match s {
        Status::Ok => 0,
        Status::ItemFailures => 1,
        Status::Usage => 2,
        Status::Io => 3,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}
