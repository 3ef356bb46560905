use std::io;
use std::path::PathBuf;

/// Errors surfaced by the pipeline and the command line.
#[derive(Debug, thiserror::Error)]
pub enum CurvestError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{stage} failed{at}: {source}", at = k.map(|k| format!(" at K = {k}")).unwrap_or_default())]
    Stage {
        stage: &'static str,
        k: Option<f64>,
        #[source]
        source: curvest_core::Error,
    },
    #[error(transparent)]
    Core(#[from] curvest_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}

pub type Result<T> = std::result::Result<T, CurvestError>;

impl CurvestError {
    pub fn config(msg: impl Into<String>) -> Self {
        CurvestError::Config(msg.into())
    }

    pub fn stage(stage: &'static str, k: Option<f64>) -> impl FnOnce(curvest_core::Error) -> Self {
        move |source| CurvestError::Stage { stage, k, source }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CurvestError::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, msg: impl ToString) -> Self {
        CurvestError::Format { path: path.into(), msg: msg.to_string() }
    }

    /// Process exit code: 2 for invalid configuration or input domain,
    /// 3 for numerical failure, 4 for exhausted resources, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let core = match self {
            CurvestError::Config(_) => return 2,
            CurvestError::Stage { source, .. } => source,
            CurvestError::Core(e) => e,
            CurvestError::Io { .. } | CurvestError::Format { .. } => return 1,
        };
        match core {
            curvest_core::Error::Domain(_) => 2,
            curvest_core::Error::Numerical(_) => 3,
            curvest_core::Error::Resource { .. } => 4,
        }
    }
}
