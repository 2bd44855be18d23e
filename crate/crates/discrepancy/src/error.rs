//! Error type shared across the crate.

/// Errors produced by constructors, snapping, engines and the CLI layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected d={expected}, got d={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate out of range [0,1): {value}")]
    CoordinateRange { value: String },

    #[error("cell cap exceeded: {cells} cells > cap {cap}")]
    CellCapExceeded { cells: u128, cap: u128 },

    #[error("grid structure: {0}")]
    GridStructure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("point-set file: {0}")]
    PointSetFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
