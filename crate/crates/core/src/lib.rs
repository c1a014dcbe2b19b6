//! Builds one integrated graph out of heterogeneous datasets.
//!
//! Relational tables, RDF, JSON, XML, HTML, text, 2d tables and PDF-derived
//! content are mapped to typed, labeled nodes and confidence-weighted edges
//! with provenance. Entity extraction, optional disambiguation and
//! similarity matching then add entity nodes, `cl:sameAs` similarity records
//! and equivalence classes.

pub mod connect;
pub mod error;
pub mod extract;
pub mod graph;
pub mod ingest;
pub mod matching;
pub mod model;
pub mod ned;
pub mod pipeline;
#[cfg(feature = "remote")]
mod remote;
pub mod sample;
pub mod storage;
pub mod typing;

pub use connect::{connect, Connection, GraphPath, DEFAULT_MAX_HOPS};
pub use error::{GraphError, IngestError, ServiceError, StoreError};
pub use graph::Graph;
pub use model::{DataModel, Dataset, DatasetId, Edge, EdgeId, Node, NodeId, NodeKind, Similar};
pub use pipeline::{BuildConfig, BuildReport, Builder, DatasetInput};
pub use storage::GraphStore;
pub use typing::{FactorizationPolicy, NullCodes};
