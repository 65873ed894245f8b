use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum RestoreError {
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    Dimension { expected: (usize, usize), got: (usize, usize) },
    #[error("PBM parse error: {0}")]
    Pbm(String),
    #[error("training needs at least 2 images, got {0}")]
    TooFewImages(usize),
    #[error("{width}x{height} exceeds the {max} pixel limit")]
    TooLarge { width: usize, height: usize, max: usize },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Core(#[from] essp_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl RestoreError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RestoreError::Io { path: path.into(), source }
    }

    /// 2 for invalid input, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            RestoreError::Io { .. } => 1,
            RestoreError::Core(e) if !matches!(e, essp_core::Error::UnknownSolver(_)) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, RestoreError>;
