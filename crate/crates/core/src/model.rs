//! Node, edge and dataset types of the integrated graph.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Identifier of a node, unique within one graph.
    NodeId
);
id_type!(
    /// Identifier of an edge, unique within one graph.
    EdgeId
);
id_type!(
    /// Identifier of a registered dataset.
    DatasetId
);

/// Single monotone counter handing out node, edge and dataset ids.
#[derive(Debug)]
pub struct IdAllocator {
    next: AtomicU64,
}

impl IdAllocator {
    pub fn starting_at(next: u64) -> Self {
        Self {
            next: AtomicU64::new(next),
        }
    }

    pub fn next_raw(&self) -> u64 {
        self.next.fetch_add(1, Ordering::Relaxed)
    }

    pub fn node(&self) -> NodeId {
        NodeId(self.next_raw())
    }

    pub fn edge(&self) -> EdgeId {
        EdgeId(self.next_raw())
    }

    pub fn dataset(&self) -> DatasetId {
        DatasetId(self.next_raw())
    }

    /// The id the next allocation will return.
    pub fn peek(&self) -> u64 {
        self.next.load(Ordering::Relaxed)
    }
}

impl Default for IdAllocator {
    fn default() -> Self {
        Self::starting_at(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    DatasetNode,
    UriNode,
    ValueNode,
    TableNode,
    TupleNode,
    MapNode,
    ArrayNode,
    ElementNode,
    AttributeNode,
    TextSegmentNode,
    HeaderCellNode,
    EntityPerson,
    EntityLocation,
    EntityOrganization,
    NumberNode,
    DateNode,
    EmailNode,
    HashtagNode,
}

impl NodeKind {
    pub const ALL: [NodeKind; 18] = [
        NodeKind::DatasetNode,
        NodeKind::UriNode,
        NodeKind::ValueNode,
        NodeKind::TableNode,
        NodeKind::TupleNode,
        NodeKind::MapNode,
        NodeKind::ArrayNode,
        NodeKind::ElementNode,
        NodeKind::AttributeNode,
        NodeKind::TextSegmentNode,
        NodeKind::HeaderCellNode,
        NodeKind::EntityPerson,
        NodeKind::EntityLocation,
        NodeKind::EntityOrganization,
        NodeKind::NumberNode,
        NodeKind::DateNode,
        NodeKind::EmailNode,
        NodeKind::HashtagNode,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::DatasetNode => "DatasetNode",
            NodeKind::UriNode => "UriNode",
            NodeKind::ValueNode => "ValueNode",
            NodeKind::TableNode => "TableNode",
            NodeKind::TupleNode => "TupleNode",
            NodeKind::MapNode => "MapNode",
            NodeKind::ArrayNode => "ArrayNode",
            NodeKind::ElementNode => "ElementNode",
            NodeKind::AttributeNode => "AttributeNode",
            NodeKind::TextSegmentNode => "TextSegmentNode",
            NodeKind::HeaderCellNode => "HeaderCellNode",
            NodeKind::EntityPerson => "EntityPerson",
            NodeKind::EntityLocation => "EntityLocation",
            NodeKind::EntityOrganization => "EntityOrganization",
            NodeKind::NumberNode => "NumberNode",
            NodeKind::DateNode => "DateNode",
            NodeKind::EmailNode => "EmailNode",
            NodeKind::HashtagNode => "HashtagNode",
        }
    }

    pub fn is_entity(self) -> bool {
        matches!(
            self,
            NodeKind::EntityPerson | NodeKind::EntityLocation | NodeKind::EntityOrganization
        )
    }

    /// Kinds that hold a leaf value of the input (candidates for factorization).
    pub fn is_value(self) -> bool {
        matches!(
            self,
            NodeKind::ValueNode
                | NodeKind::UriNode
                | NodeKind::NumberNode
                | NodeKind::DateNode
                | NodeKind::EmailNode
                | NodeKind::HashtagNode
        )
    }

    /// Kinds whose label is always the empty label.
    pub fn is_unlabeled(self) -> bool {
        matches!(
            self,
            NodeKind::MapNode | NodeKind::ArrayNode | NodeKind::TupleNode
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown node kind {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Node {
    pub id: NodeId,
    pub label: String,
    pub kind: NodeKind,
    pub dataset: DatasetId,
    pub normalized_label: String,
    pub representative: NodeId,
}

impl Node {
    pub fn new(id: NodeId, label: impl Into<String>, kind: NodeKind, dataset: DatasetId) -> Self {
        let label = if kind.is_unlabeled() {
            String::new()
        } else {
            label.into()
        };
        let normalized_label = if kind == NodeKind::EntityPerson {
            crate::matching::normalize_person(&label).to_lowercase()
        } else {
            normalize_label(&label)
        };
        Self {
            id,
            label,
            kind,
            dataset,
            normalized_label,
            representative: id,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub source: NodeId,
    pub target: NodeId,
    pub label: String,
    pub dataset: DatasetId,
    pub confidence: f64,
}

/// A similarity record between two nodes, stored with the smaller id first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similar {
    pub source: NodeId,
    pub target: NodeId,
    pub similarity: f64,
}

impl Similar {
    pub fn new(a: NodeId, b: NodeId, similarity: f64) -> Self {
        let (source, target) = if a <= b { (a, b) } else { (b, a) };
        Self {
            source,
            target,
            similarity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DataModel {
    Relational,
    Rdf,
    Json,
    Xml,
    Html,
    Text,
    Table2d,
    PdfDerived,
}

impl DataModel {
    /// Tree-shaped models, which follow the configured factorization policy.
    pub fn is_hierarchical(self) -> bool {
        !matches!(self, DataModel::Rdf)
    }
}

impl FromStr for DataModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "relational" | "csv" => DataModel::Relational,
            "rdf" | "nt" | "ntriples" => DataModel::Rdf,
            "json" => DataModel::Json,
            "xml" => DataModel::Xml,
            "html" | "htm" => DataModel::Html,
            "text" | "txt" => DataModel::Text,
            "table2d" | "grid" => DataModel::Table2d,
            "pdf" => DataModel::PdfDerived,
            other => return Err(format!("unknown data model {other:?}")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub id: DatasetId,
    pub model: DataModel,
    pub prov: Option<String>,
    /// The dataset node anchoring this dataset in the graph.
    pub node: NodeId,
}

/// Reserved edge labels.
pub mod labels {
    pub const PROV: &str = "cl:prov";
    pub const SAME_AS: &str = "cl:sameAs";
    pub const SAME_AS_URI: &str = "cl:sameAsUri";
    pub const EXTRACT_PERSON: &str = "cl:extractPerson";
    pub const EXTRACT_LOCATION: &str = "cl:extractLocation";
    pub const EXTRACT_ORGANIZATION: &str = "cl:extractOrganization";
    pub const PARENT_HEADER_CELL: &str = "cl:parentHeaderCell";
    pub const CLOSEST_X_HEADER_CELL: &str = "cl:closestXHeaderCell";
    pub const CLOSEST_Y_HEADER_CELL: &str = "cl:closestYHeaderCell";
    pub const EXTRACTED_FROM_PDF: &str = "cl:extractedFromPDF";

    pub const RESERVED_PREFIX: &str = "cl:";
}

/// Rewrites user-supplied edge labels that collide with the reserved namespace.
pub fn escape_user_label(label: &str) -> Cow<'_, str> {
    match label.strip_prefix(labels::RESERVED_PREFIX) {
        Some(rest) => Cow::Owned(format!("cl%3A{rest}")),
        None => Cow::Borrowed(label),
    }
}

/// Trim, collapse internal whitespace and case-fold.
pub fn normalize_label(label: &str) -> String {
    collapse_whitespace(label).to_lowercase()
}

pub(crate) fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}
