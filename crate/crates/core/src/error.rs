use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate object: {0}")]
    DegenerateObject(String),

    #[error(
        "object footprint {x:.3} m x {y:.3} m does not fit a {room_x:.2} m x {room_y:.2} m room"
    )]
    DoesNotFit {
        x: f64,
        y: f64,
        room_x: f64,
        room_y: f64,
    },

    #[error("degenerate pair: {0}")]
    DegeneratePair(String),

    #[error("instance {0} has no points")]
    MissingInstance(u32),

    #[error("degenerate feature: norm {0:e} before normalization")]
    DegenerateFeature(f64),

    #[error("{path}:{line}: {msg}")]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {count} points, at least {min} required")]
    TooFewPoints {
        path: PathBuf,
        count: usize,
        min: usize,
    },

    #[error("corrupt container at byte {offset}: {msg}")]
    CorruptContainer { offset: u64, msg: String },

    #[error("wrong format: expected magic {expected:?}, found {found:?}")]
    WrongFormat { expected: String, found: String },

    #[error("config {path}:{line}: {msg}")]
    Config {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
