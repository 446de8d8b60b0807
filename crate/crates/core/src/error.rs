use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spine length must be at least 2, got {0}")]
    SpineTooShort(usize),

    #[error("spine index {index} out of range 1..={m}")]
    SpineIndexOutOfRange { index: usize, m: usize },

    #[error("leaf vector has {len} entries but spine length is {m}")]
    LeafLengthMismatch { len: usize, m: usize },

    #[error("leaf counts sum to {sum} but n = {n}")]
    LeafSumMismatch { sum: u64, n: u64 },

    #[error("malformed tree document: {0}")]
    MalformedDocument(#[from] serde_json::Error),

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("point is not on the probability simplex: {0}")]
    OffSimplex(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("undefined quantity: {0}")]
    Undefined(&'static str),

    #[error("collection mixes trees of different shapes")]
    MixedShapes,

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
