use std::path::PathBuf;

use thiserror::Error;

/// Everything that can stop a run. Each variant maps to its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("ingest: {path}: missing column(s) {missing:?}; expected header frame,id,x,y")]
    MissingColumns { path: PathBuf, missing: Vec<String> },
    #[error("ingest: {path}: ids must be 1..={expected} without holes, found {found:?}")]
    NonContiguousIds {
        path: PathBuf,
        expected: usize,
        found: Vec<usize>,
    },
    #[error("ingest: {path}: id {id} is missing frames {first}..={last} ({len} frames, max_gap is {max_gap})")]
    GapTooLong {
        path: PathBuf,
        id: usize,
        first: i64,
        last: i64,
        len: usize,
        max_gap: usize,
    },
    #[error("ingest: {path}: id {id} does not span frames {first}..={last} (has {own_first}..={own_last})")]
    TruncatedTrack {
        path: PathBuf,
        id: usize,
        first: i64,
        last: i64,
        own_first: i64,
        own_last: i64,
    },
    #[error("ingest: {path}: duplicate row for id {id} at frame {frame}")]
    Duplicate { path: PathBuf, id: usize, frame: i64 },
    #[error("ingest: {path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("estimate: {0}")]
    Model(#[from] schoolnet::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Model(_) => 4,
            CliError::MissingColumns { .. } => 10,
            CliError::NonContiguousIds { .. } => 11,
            CliError::GapTooLong { .. } => 12,
            CliError::TruncatedTrack { .. } => 13,
            CliError::Duplicate { .. } => 14,
            CliError::Parse { .. } => 15,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
