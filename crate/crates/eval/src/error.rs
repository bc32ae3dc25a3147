use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Core(#[from] dlo_core::Error),

    #[error("could not place {n_dlos} DLOs without a rejected configuration after {attempts} attempts")]
    Generation { n_dlos: usize, attempts: usize },

    #[error("invalid generator parameters: {0}")]
    Params(String),

    #[error("bundle {path}: {detail}")]
    Bundle { path: PathBuf, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;
