use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("failed to access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown node type `{0}`")]
    UnknownNodeType(String),

    #[error("unknown node type id {0}")]
    UnknownTypeId(usize),

    #[error("unknown edge type `{0}`")]
    UnknownEdgeType(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("invalid motif `{motif}`: {reason}")]
    InvalidMotif { motif: String, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("dimension {0} exceeds the 32-bit index width")]
    IndexOverflow(usize),

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("node type `{0}` appears in no motif and cannot be clustered")]
    Unclusterable(String),

    #[error("non-finite multiplicative update for motif {motif} position {position}: {detail}")]
    NonFinite {
        motif: usize,
        position: usize,
        detail: String,
    },

    #[error("cannot evaluate an empty partition")]
    EmptyPartition,

    #[error("invalid label partition: {0}")]
    InvalidPartition(String),

    #[error("invalid planted parameters: {0}")]
    Planted(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
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
