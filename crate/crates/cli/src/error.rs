use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Ok = 0,
    Usage = 2,
    ItemFailures = 3,
    Io = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: dlo_core::Error,
    },

    #[error(transparent)]
    Core(#[from] dlo_core::Error),

    #[error(transparent)]
    Eval(#[from] dlo_eval::EvalError),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: impl Into<dlo_core::Error>) -> Self {
        CliError::Io {
            path: path.into(),
            source: source.into(),
        }
    }

    pub fn status(&self) -> Status {
        match self {
            CliError::Usage(_) => Status::Usage,
            CliError::Io { .. } => Status::Io,
            CliError::Eval(
                dlo_eval::EvalError::Io(_) | dlo_eval::EvalError::Json(_) | dlo_eval::EvalError::Bundle { .. },
            ) => Status::Io,
            _ => match self.core().map(dlo_core::Error::kind) {
                Some("io" | "image" | "json") => Status::Io,
                Some("config") => Status::Usage,
                _ => Status::ItemFailures,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { source, .. } => source.kind(),
            CliError::Core(e) => e.kind(),
            CliError::Eval(dlo_eval::EvalError::Generation { .. }) => "generation",
            CliError::Eval(_) => "eval",
        }
    }

    pub fn core(&self) -> Option<&dlo_core::Error> {
        match self {
            CliError::Io { source, .. } | CliError::Core(source) => Some(source),
            CliError::Eval(dlo_eval::EvalError::Core(e)) => Some(e),
            _ => None,
        }
    }
}
