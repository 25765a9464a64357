use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("face {face} refers to vertex {index} but the mesh has {n} vertices")]
    IndexOutOfRange { face: usize, index: usize, n: usize },

    #[error("face {face} repeats a vertex index")]
    DegenerateFace { face: usize },

    #[error("mesh has no faces")]
    NoFaces,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigendecomposition did not converge ({0})")]
    ConvergenceFailure(String),

    #[error("orthogonal iteration lost rank at block {block}, column {column}")]
    RankDeficiency { block: usize, column: usize },

    #[error("bit depth {0} outside 1..=16")]
    InvalidBits(u32),

    #[error("invalid count: {0}")]
    InvalidCount(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot split {k} frames into {n_b} blocks")]
    BlockSizeError { k: usize, n_b: usize },

    #[error("dictionary difference column {column} of block {block} has norm {norm:.3}; signs are misaligned")]
    SignMisalignment { block: usize, column: usize, norm: f64 },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("linear system is singular (pivot {pivot})")]
    SingularSystem { pivot: usize },

    #[error("corrupt payload: {0}")]
    CorruptPayload(String),

    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    #[error("unsupported stream version {found} (expected {expected})")]
    VersionMismatch { found: u16, expected: u16 },

    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("frame {frame} has a different face list than frame 0")]
    ConnectivityMismatch { frame: usize },

    #[error("frame {frame} has {found} vertices, expected {expected}")]
    VertexCountMismatch { frame: usize, found: usize, expected: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable short name, used by the CLI for machine-readable errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DegenerateFace { .. } => "DegenerateFace",
            Error::NoFaces => "NoFaces",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::RankDeficiency { .. } => "RankDeficiency",
            Error::InvalidBits(_) => "InvalidBits",
            Error::InvalidCount(_) => "InvalidCount",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::BlockSizeError { .. } => "BlockSizeError",
            Error::SignMisalignment { .. } => "SignMisalignment",
            Error::InvalidSequence(_) => "InvalidSequence",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::CorruptPayload(_) => "CorruptPayload",
            Error::CorruptStream(_) => "CorruptStream",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::Parse { .. } => "ParseError",
            Error::ConnectivityMismatch { .. } => "ConnectivityMismatch",
            Error::VertexCountMismatch { .. } => "VertexCountMismatch",
            Error::Io(_) => "IoError",
            Error::Csv(_) => "IoError",
        }
    }
}

pub(crate) fn dim_mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
