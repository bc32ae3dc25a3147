//! Instance segmentation of deformable linear objects (cables, ropes,
//! wires) from a binary foreground mask.
//!
//! The mask is thinned to a skeleton, split ends are pruned, crossings are
//! rebuilt as single-center patches, and the skeleton is walked end to end.
//! At each crossing the walk continues along the arm pairing with the least
//! discrete bending. See [`pipeline::run_pipeline`] for the end-to-end entry
//! point.

pub mod error;
pub mod imgproc;
pub mod intersections;
pub mod keypoints;
pub mod output;
pub mod pipeline;
pub mod raster;
pub mod skeleton;
pub mod tracer;
pub mod walk;

pub use error::{Error, Result, Stage};
pub use pipeline::{run_pipeline, PipelineOptions, SceneInput, SceneResult, StageTimings};
pub use raster::{BinaryMask, Dims, Px, RgbImage};
