//! Per-format mapping of datasets to nodes and edges.
//!
//! Every edge created here reflects input structure and carries confidence 1.
//! Reports count the content of one document: the dataset node and the
//! anchoring edges from it are tallied separately.

mod html;
mod json;
mod pdf;
mod rdf;
mod relational;
mod table2d;
mod text;
mod xml;

use serde::{Deserialize, Serialize};

pub use html::ingest_html;
pub use json::{ingest_json, ingest_json_value};
#[cfg(feature = "remote")]
pub use pdf::HttpPdfService;
pub use pdf::{
    ingest_pdf, ExtractedLine, ExtractedTable, ExtractedText, PdfExtraction, PdfIngestReport,
    PdfService,
};
pub use rdf::{ingest_rdf, ingest_triples, parse_ntriples, parse_ntriples_line, Term, Triple};
pub use relational::{
    csv_to_relational, ingest_csv, ingest_relational, ForeignKey, RelationalInput,
};
pub use table2d::{ingest_2dtable, Grid2d, Merge, Table2dReport};
pub use text::{ingest_text, Segmenter};
pub use xml::ingest_xml;

use crate::error::GraphError;
use crate::graph::{Graph, NodeRef};
use crate::model::{escape_user_label, DatasetId, EdgeId, NodeId, NodeKind};
use crate::typing::LabelPath;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    /// Nodes created for the document content.
    pub nodes: usize,
    /// Value occurrences that reused an existing node.
    pub reused: usize,
    /// Content edges.
    pub edges: usize,
    /// Edges from the dataset node to top-level content.
    pub anchor_edges: usize,
    /// Rows, triples or tables that could not be mapped.
    pub rejected: usize,
    pub issues: Vec<String>,
}

impl IngestReport {
    pub fn merge(&mut self, other: &IngestReport) {
        self.nodes += other.nodes;
        self.reused += other.reused;
        self.edges += other.edges;
        self.anchor_edges += other.anchor_edges;
        self.rejected += other.rejected;
        self.issues.extend(other.issues.iter().cloned());
    }
}

/// Writes one document's nodes and edges while keeping the report.
pub(crate) struct Emitter<'g> {
    pub graph: &'g mut Graph,
    pub ds: DatasetId,
    pub report: IngestReport,
}

impl<'g> Emitter<'g> {
    pub fn new(graph: &'g mut Graph, ds: DatasetId) -> Result<Self, GraphError> {
        if graph.dataset(ds).is_none() {
            return Err(GraphError::UnknownDataset(ds.0));
        }
        Ok(Self {
            graph,
            ds,
            report: IngestReport::default(),
        })
    }

    pub fn dataset_node(&self) -> NodeId {
        self.graph.dataset(self.ds).expect("checked in new").node
    }

    fn count(&mut self, r: NodeRef) -> NodeId {
        if r.created {
            self.report.nodes += 1;
        } else {
            self.report.reused += 1;
        }
        r.id
    }

    pub fn fresh(&mut self, label: &str, kind: NodeKind) -> Result<NodeId, GraphError> {
        let id = self.graph.add_node(label, kind, self.ds)?;
        self.report.nodes += 1;
        Ok(id)
    }

    pub fn value(&mut self, label: &str, path: &LabelPath) -> Result<NodeId, GraphError> {
        let r = self.graph.value_node(label, path)?;
        Ok(self.count(r))
    }

    pub fn keyed(
        &mut self,
        key: String,
        label: &str,
        kind: NodeKind,
    ) -> Result<NodeId, GraphError> {
        let r = self.graph.keyed_node(key, label, kind, self.ds)?;
        Ok(self.count(r))
    }

    pub fn uri(&mut self, uri: &str) -> Result<NodeId, GraphError> {
        let r = self.graph.uri_node(uri, self.ds)?;
        Ok(self.count(r))
    }

    /// Edge whose label comes from user data.
    pub fn edge(
        &mut self,
        source: NodeId,
        target: NodeId,
        label: &str,
    ) -> Result<EdgeId, GraphError> {
        let label = escape_user_label(label);
        self.reserved_edge(source, target, &label)
    }

    /// Edge with a label chosen by the ingester (may be in the reserved namespace).
    pub fn reserved_edge(
        &mut self,
        source: NodeId,
        target: NodeId,
        label: &str,
    ) -> Result<EdgeId, GraphError> {
        let id = self.graph.add_edge(source, target, label, self.ds, 1.0)?;
        self.report.edges += 1;
        Ok(id)
    }

    pub fn anchor(&mut self, target: NodeId) -> Result<EdgeId, GraphError> {
        let source = self.dataset_node();
        let id = self.graph.add_edge(source, target, "", self.ds, 1.0)?;
        self.report.anchor_edges += 1;
        Ok(id)
    }

    pub fn finish(self) -> IngestReport {
        self.report
    }
}
