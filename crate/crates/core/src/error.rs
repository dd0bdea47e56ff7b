use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("empty frame sequence")]
    EmptySequence,

    #[error("inhomogeneous frame sizes: frame {index} is {got_width}x{got_height}, expected {width}x{height}")]
    InhomogeneousFrames {
        index: usize,
        width: u32,
        height: u32,
        got_width: u32,
        got_height: u32,
    },

    #[error("invalid fps {0}; must be finite and positive")]
    InvalidFps(f64),

    #[error("missing metadata at {0}")]
    MissingMetadata(PathBuf),

    #[error("frame count mismatch: metadata declares {declared}, found {found}")]
    FrameCountMismatch { declared: usize, found: usize },

    #[error("unreadable image {path}: {reason}")]
    UnreadableImage { path: PathBuf, reason: String },

    #[error("malformed raw frame file: {0}")]
    MalformedRaw(String),

    #[error("sequence too short: {0}")]
    TooShort(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-binary motion map")]
    NonBinary,

    #[error("weighted map value {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("missing take {take} for scenario {scenario_id} ({perspective})")]
    MissingTake {
        scenario_id: String,
        perspective: String,
        take: u8,
    },

    #[error("switch index differs between takes of {0}")]
    SwitchMismatch(String),

    #[error("unknown category label {0:?}")]
    UnknownCategory(String),

    #[error("empty report")]
    EmptyReport,

    #[error("inconsistent scenario coverage: {0}")]
    CoverageMismatch(String),

    #[error("statistics: {0}")]
    Statistics(String),

    #[error("invalid synthetic scenario: {0}")]
    InvalidSynth(String),

    #[error("input too large for enumeration oracle: {0}")]
    OracleCap(String),

    #[error("scenario sets differ: {0}")]
    ScenarioMismatch(String),

    #[error("judge transport failure: {0}")]
    Transport(String),

    #[error("no parseable verdicts")]
    NoParseableVerdicts,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
