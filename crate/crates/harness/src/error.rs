use std::io;
use std::path::PathBuf;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("task {task}: {source}")]
    Task {
        task: String,
        #[source]
        source: snapshot_ilp::Error,
    },
    #[error(transparent)]
    Core(#[from] snapshot_ilp::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 usage, 2 task or data, 3 resource limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) | HarnessError::Config(_) => 1,
            HarnessError::Task { source, .. } | HarnessError::Core(source) => match source {
                snapshot_ilp::Error::ResourceLimit { .. } => 3,
                snapshot_ilp::Error::Bag { source, .. }
                    if matches!(**source, snapshot_ilp::Error::ResourceLimit { .. }) =>
                {
                    3
                }
                _ => 2,
            },
            _ => 2,
        }
    }
}
