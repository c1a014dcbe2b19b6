use thiserror::Error;

use crate::model::NodeId;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("storage backend: {0}")]
    Backend(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("constraint violation: {0}")]
    Constraint(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("confidence {0} outside [0, 1]")]
    InvalidConfidence(f64),
    #[error("edge endpoint {0} does not exist")]
    DanglingEndpoint(NodeId),
    #[error("malformed provenance URI {0:?}")]
    Provenance(String),
    #[error("unknown dataset {0}")]
    UnknownDataset(u64),
    #[error("node {0} is not an entity")]
    NotAnEntity(NodeId),
}

/// Failure talking to an external extraction, disambiguation or PDF service.
#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("malformed reply: {0}")]
    Malformed(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("service returned status {0}")]
    Status(u16),
}

impl ServiceError {
    /// Transport failures may succeed on a later attempt.
    pub fn is_retryable(&self) -> bool {
        matches!(self, ServiceError::Transport(_))
            || matches!(self, ServiceError::Status(s) if *s >= 500)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid 2d table: {0}")]
    InvalidGrid(String),
    #[error("extraction service: {0}")]
    Service(#[from] ServiceError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl IngestError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, IngestError::Service(e) if e.is_retryable())
    }
}

impl From<StoreError> for IngestError {
    fn from(e: StoreError) -> Self {
        IngestError::Graph(GraphError::Store(e))
    }
}
