use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sequence too short: need at least {needed} frames, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("bad target length {0}: must be at least 2")]
    BadLength(usize),

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("point {0:?} lies outside the grid bounds")]
    OutOfBounds([f64; 3]),

    #[error("query point lies on the mesh surface (triangle {triangle})")]
    PointOnSurface { triangle: usize },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("frame rate mismatch: {0} vs {1}")]
    FpsMismatch(u32, u32),

    #[error("channel mismatch: {0}")]
    MarkerMismatch(String),

    #[error("HHI command count mismatch: {a} vs {b}")]
    HhiCountMismatch { a: usize, b: usize },

    #[error("degenerate retiming interval [{start}, {end}] for length {len}")]
    DegenerateInterval {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("embedding index is empty")]
    EmptyIndex,

    #[error("duplicate clip id {0}")]
    DuplicateClip(u64),

    #[error("grammar error at line {line}, column {column}: {message}")]
    Grammar {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("script is not executable: {0}")]
    InvalidScript(String),

    #[error("navigation grid has no walkable cell")]
    NoWalkableCell,

    #[error("no object named {0:?} in the scene catalog")]
    UnknownObject(String),

    #[error("no walkable point found near {target:?} after {attempts} attempts")]
    Unreachable { target: String, attempts: usize },

    #[error("language model client failed after {attempts} attempt(s): {message}")]
    Client { attempts: usize, message: String },

    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn format(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
