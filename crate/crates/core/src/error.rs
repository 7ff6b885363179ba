use std::path::PathBuf;

use thiserror::Error;

use crate::graph::AgentId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unbounded gregariousness: link cost must be positive (got {0})")]
    UnboundedGregariousness(f64),

    #[error("self-edge on agent {0}")]
    SelfEdge(AgentId),

    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(AgentId, AgentId),

    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),

    #[error("insufficient samples for {what}: need {needed}, have {have}")]
    Insufficient { what: &'static str, needed: usize, have: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("missing input {}", .0.display())]
    MissingInput(PathBuf),

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv { path: path.into(), source }
    }
}
