use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "dlo", version, about = "Deformable linear object instance segmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment and trace images.
    Run(RunArgs),
    /// Write seeded synthetic scene bundles.
    Gen(GenArgs),
    /// Time the pipeline on a dataset and score it against ground truth.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Input images (RGB), or binary masks with --mask-input.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// HSV filter config (TOML with [[band]] tables); required for RGB input.
    #[arg(long, value_name = "PATH", conflicts_with = "mask_input")]
    pub hsv_config: Option<PathBuf>,

    /// Treat inputs as precomputed binary masks.
    #[arg(long)]
    pub mask_input: bool,

    /// With --mask-input: the color image for each mask, in input order. Used
    /// for crossing order and the overlay.
    #[arg(long, value_name = "PATH", requires = "mask_input")]
    pub image: Vec<PathBuf>,

    /// Output directory; each input gets a subdirectory named after its stem.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// Also write overlay.png.
    #[arg(long)]
    pub overlay: bool,

    /// Also write skeleton, keypoint and intersection dumps.
    #[arg(long)]
    pub debug_dumps: bool,

    /// Trace closed loops that have no ends.
    #[arg(long)]
    pub allow_cycles: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Number of DLOs per scene.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub tier: u8,

    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub count: u32,

    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of scene bundles.
    pub dataset: PathBuf,

    /// Timed repetitions per image.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub reps: u32,

    /// HSV filter config; defaults to the generator's saturated-color filter.
    #[arg(long, value_name = "PATH")]
    pub hsv_config: Option<PathBuf>,

    #[arg(long)]
    pub allow_cycles: bool,

    /// Where to write dice_report.json and timing_report.json; defaults to
    /// the dataset directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}
