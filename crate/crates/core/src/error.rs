use std::fmt;

use serde::Serialize;

use crate::raster::Px;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage, used to locate failures in diagnostics and timings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Segmentation,
    Thinning,
    Keypoints,
    Intersections,
    Tracing,
    Rendering,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Segmentation,
        Stage::Thinning,
        Stage::Keypoints,
        Stage::Intersections,
        Stage::Tracing,
        Stage::Rendering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Segmentation => "segmentation",
            Stage::Thinning => "thinning",
            Stage::Keypoints => "keypoints",
            Stage::Intersections => "intersections",
            Stage::Tracing => "tracing",
            Stage::Rendering => "rendering",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("scene contains no foreground pixels")]
    EmptyScene,

    #[error("intersection at {at:?} has {segments} emanating segments; only two-strand crossings are supported")]
    UnsupportedIntersection { at: Px, segments: usize },

    #[error("skeleton topology error at {at:?}: {detail}")]
    Topology { at: Px, detail: String },

    #[error("closed skeleton loop without ends at {at:?}")]
    DisconnectedCycle { at: Px },

    #[error("{stage} stage failed: {source}")]
    InStage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn topology(at: Px, detail: impl Into<String>) -> Self {
        Error::Topology {
            at,
            detail: detail.into(),
        }
    }

    pub(crate) fn in_stage(self, stage: Stage) -> Self {
        match self {
            Error::InStage { .. } => self,
            other => Error::InStage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// Innermost error with any stage wrapper removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::InStage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::InStage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// Pixel the failure is attributed to, when there is one.
    pub fn location(&self) -> Option<Px> {
        match self.root() {
            Error::UnsupportedIntersection { at, .. }
            | Error::Topology { at, .. }
            | Error::DisconnectedCycle { at } => Some(*at),
            _ => None,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::Config(_) => "config",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptyScene => "empty_scene",
            Error::UnsupportedIntersection { .. } => "unsupported_intersection",
            Error::Topology { .. } => "topology",
            Error::DisconnectedCycle { .. } => "disconnected_cycle",
            Error::InStage { .. } => unreachable!(),
            Error::Io(_) => "io",
            Error::Image(_) => "image",
            Error::Json(_) => "json",
        }
    }
}
