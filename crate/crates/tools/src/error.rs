use std::path::PathBuf;

/// Failures of the harness, the file formats and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] opplearn_core::Error),

    #[error("{path}: row {row}, column {column}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    /// Too many ground-truth opposites fell outside the function image.
    #[error("scheme mismatch in run {run}: {flagged} of {total} true opposites lie outside the function image")]
    SchemeMismatch { run: usize, flagged: usize, total: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    /// 2 usage or validation, 3 data degeneracy, 4 internal numeric failure.
    pub fn exit_code(&self) -> i32 {
        use opplearn_core::Error as E;
        match self {
            Self::Core(E::DegenerateRange(_)) | Self::SchemeMismatch { .. } => 3,
            Self::Core(E::NonFinite(_) | E::Inversion { .. }) | Self::NonFinite(_) => 4,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
