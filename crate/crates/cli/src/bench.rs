use serde_json::json;

use dlo_core::imgproc::io::write_atomic;
use dlo_core::output::to_json_bytes;
use dlo_core::tracer::TraceOptions;
use dlo_core::PipelineOptions;
use dlo_eval::bundle::{list_bundles, read_bundle, Bundle};
use dlo_eval::{benchmark, run_and_score, scene_filter, CrossingTally, TierSummary};

use crate::args::BenchArgs;
use crate::diag;
use crate::error::{CliError, Result, Status};
use crate::run::{load_filter, worse};

pub const REPORT_SCHEMA: u32 = 1;

pub fn bench(a: BenchArgs) -> Result<Status> {
    if !a.dataset.is_dir() {
        return Err(CliError::Usage(format!("{} is not a directory", a.dataset.display())));
    }
    let dirs = list_bundles(&a.dataset).map_err(|e| match e {
        dlo_eval::EvalError::Io(io) => CliError::io(&a.dataset, io),
        other => other.into(),
    })?;
    if dirs.is_empty() {
        return Err(CliError::Usage(format!(
            "no scene bundles under {}",
            a.dataset.display()
        )));
    }
    let filter = match &a.hsv_config {
        Some(p) => load_filter(p)?,
        None => scene_filter(),
    };
    let opts = PipelineOptions {
        trace: TraceOptions {
            allow_cycles: a.allow_cycles,
        },
    };

    let mut status = Status::Ok;
    let mut bundles: Vec<Bundle> = Vec::with_capacity(dirs.len());
    for dir in &dirs {
        match read_bundle(dir) {
            Ok(b) => {
                if b.truth.is_none() {
                    diag::warning(
                        dir,
                        "missing_ground_truth",
                        "no ground truth; scene is timed but not scored",
                    );
                }
                bundles.push(b);
            }
            Err(e) => {
                let e = CliError::from(e);
                diag::item_error(dir, &e);
                status = worse(status, e.status());
            }
        }
    }

    let mut scores = Vec::new();
    let mut tally = CrossingTally::default();
    let mut scenes = Vec::new();
    let mut failures = 0;
    for b in &bundles {
        let Some(truth) = &b.truth else { continue };
        let out = run_and_score(&b.image, truth, &filter, opts)?;
        let error = out.result.err().map(|e| {
            let e = CliError::Core(e);
            diag::item_error(&b.dir, &e);
            failures += 1;
            status = worse(status, Status::ItemFailures);
            e.to_string()
        });
        scores.extend_from_slice(&out.dice.scores);
        tally.add(out.crossings);
        scenes.push(json!({
            "bundle": b.dir.display().to_string(),
            "scores": out.dice.scores,
            "mean": out.dice.mean,
            "crossings": out.crossings,
            "error": error,
        }));
    }

    let images: Vec<_> = bundles.iter().map(|b| b.image.clone()).collect();
    let timing = benchmark(&images, &filter, a.reps as usize, opts);

    let out_dir = a.out.clone().unwrap_or_else(|| a.dataset.clone());
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    let write = |name: &str, v: &serde_json::Value| {
        let p = out_dir.join(name);
        write_atomic(&p, &to_json_bytes(v)?).map_err(|e| CliError::io(p, e))
    };
    write(
        "timing_report.json",
        &json!({ "schema": REPORT_SCHEMA, "timing": timing }),
    )?;
    print!("{}", timing.table());

    if scenes.is_empty() {
        diag::warning(
            &a.dataset,
            "missing_ground_truth",
            "no bundle has ground truth; DICE evaluation skipped",
        );
    } else {
        let summary = TierSummary::from_scores(scenes.len(), failures, &scores, tally);
        write(
            "dice_report.json",
            &json!({ "schema": REPORT_SCHEMA, "summary": summary, "scenes": scenes }),
        )?;
        println!(
            "DICE {:.4} +- {:.4} over {} instances in {} scenes ({} failed); crossing order {}/{}",
            summary.mean_dice,
            summary.std_dice,
            summary.instances,
            summary.scenes,
            summary.failures,
            summary.crossings.correct,
            summary.crossings.total
        );
    }
    Ok(status)
}
