//! Named-entity extraction and entity nodes.
//!
//! An extractor turns a label into entity occurrences. The graph keeps one
//! entity node per key, and each occurrence adds a `cl:extract*` edge from the
//! node whose label contained it.

mod gazetteer;
#[cfg(feature = "remote")]
mod remote;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use web_time::Instant;

pub use gazetteer::Gazetteer;
#[cfg(feature = "remote")]
pub use remote::RemoteExtractor;

use crate::error::{GraphError, ServiceError};
use crate::graph::Graph;
use crate::matching::normalize_person;
use crate::model::{labels, normalize_label, EdgeId, Node, NodeId, NodeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityType {
    #[serde(rename = "PER")]
    Person,
    #[serde(rename = "LOC")]
    Location,
    #[serde(rename = "ORG")]
    Organization,
}

impl EntityType {
    pub const ALL: [EntityType; 3] = [
        EntityType::Person,
        EntityType::Location,
        EntityType::Organization,
    ];

    /// Wire code.
    pub fn code(self) -> &'static str {
        match self {
            EntityType::Person => "PER",
            EntityType::Location => "LOC",
            EntityType::Organization => "ORG",
        }
    }

    pub fn node_kind(self) -> NodeKind {
        match self {
            EntityType::Person => NodeKind::EntityPerson,
            EntityType::Location => NodeKind::EntityLocation,
            EntityType::Organization => NodeKind::EntityOrganization,
        }
    }

    pub fn edge_label(self) -> &'static str {
        match self {
            EntityType::Person => labels::EXTRACT_PERSON,
            EntityType::Location => labels::EXTRACT_LOCATION,
            EntityType::Organization => labels::EXTRACT_ORGANIZATION,
        }
    }

    pub fn from_kind(kind: NodeKind) -> Option<Self> {
        EntityType::ALL.into_iter().find(|t| t.node_kind() == kind)
    }
}

impl FromStr for EntityType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PER" | "Person" | "person" => Ok(EntityType::Person),
            "LOC" | "Location" | "location" => Ok(EntityType::Location),
            "ORG" | "Organization" | "organization" => Ok(EntityType::Organization),
            other => Err(format!("unknown entity type {other:?}")),
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A mention found in a text; offsets count Unicode code points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntityOccurrence {
    pub start: usize,
    pub end: usize,
    pub entity_type: EntityType,
    pub confidence: f64,
    pub surface: String,
}

impl EntityOccurrence {
    /// Builds an occurrence over `text`, checking offsets and confidence.
    pub fn within(
        text: &str,
        start: usize,
        end: usize,
        entity_type: EntityType,
        confidence: f64,
    ) -> Result<Self, String> {
        let len = text.chars().count();
        if start >= end || end > len {
            return Err(format!(
                "span {start}..{end} invalid for text of length {len}"
            ));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(format!("confidence {confidence} outside [0, 1]"));
        }
        Ok(Self {
            start,
            end,
            entity_type,
            confidence,
            surface: text.chars().skip(start).take(end - start).collect(),
        })
    }
}

pub trait Extractor: Send + Sync {
    /// Non-overlapping occurrences sorted by start offset.
    fn extract(&self, text: &str) -> Result<Vec<EntityOccurrence>, ServiceError>;
}

/// Identity of an entity node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntityKey {
    KbUri(String),
    Surface(EntityType, String),
}

impl EntityKey {
    /// Key of a non-disambiguated occurrence.
    pub fn surface(entity_type: EntityType, surface: &str) -> Self {
        let normalized = match entity_type {
            EntityType::Person => normalize_person(surface).to_lowercase(),
            _ => normalize_label(surface),
        };
        EntityKey::Surface(entity_type, normalized)
    }

    pub fn encode(&self) -> String {
        match self {
            EntityKey::KbUri(uri) => format!("entity:uri:{uri}"),
            EntityKey::Surface(t, s) => format!("entity:{}:{s}", t.code()),
        }
    }
}

/// Links `node` to the entity node of each occurrence, creating entity nodes
/// on first sight. Returns the (entity node, edge) pair of each occurrence.
pub fn attach_entities(
    graph: &mut Graph,
    node: NodeId,
    occurrences: &[EntityOccurrence],
    keys: &[EntityKey],
) -> Result<Vec<(NodeId, EdgeId)>, GraphError> {
    assert_eq!(
        occurrences.len(),
        keys.len(),
        "occurrences and keys must align"
    );
    let source = graph
        .node(node)?
        .ok_or(GraphError::DanglingEndpoint(node))?;
    let mut out = Vec::with_capacity(occurrences.len());
    for (occ, key) in occurrences.iter().zip(keys) {
        let entity = graph
            .keyed_node(
                key.encode(),
                &occ.surface,
                occ.entity_type.node_kind(),
                source.dataset,
            )?
            .id;
        let edge = graph.add_edge(
            node,
            entity,
            occ.entity_type.edge_label(),
            source.dataset,
            occ.confidence,
        )?;
        out.push((entity, edge));
    }
    Ok(out)
}

/// Occurrences found in one node label and the entity nodes they point to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotation {
    pub node: NodeId,
    pub text: String,
    pub occurrences: Vec<EntityOccurrence>,
    pub entities: Vec<NodeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractionReport {
    pub labels_scanned: usize,
    pub occurrences: usize,
    /// Distinct entity nodes per type.
    pub persons: usize,
    pub locations: usize,
    pub organizations: usize,
    /// Labels whose extraction failed; their nodes stay entity-free.
    pub failures: usize,
    pub issues: Vec<String>,
    #[serde(skip)]
    pub annotations: Vec<Annotation>,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Labels of these nodes are scanned for entities.
pub fn is_extractable(node: &Node, graph: &Graph) -> bool {
    matches!(node.kind, NodeKind::ValueNode | NodeKind::TextSegmentNode)
        && !node.label.trim().is_empty()
        && !graph.null_codes().contains(&node.label)
}

/// Runs `extractor` over every eligible node label of the graph. Each distinct
/// label is sent once.
pub fn extract_graph(
    graph: &mut Graph,
    extractor: &dyn Extractor,
) -> Result<ExtractionReport, GraphError> {
    let start = Instant::now();
    let nodes: Vec<Node> = graph
        .nodes()?
        .into_iter()
        .filter(|n| is_extractable(n, graph))
        .collect();

    let mut distinct: Vec<&str> = nodes.iter().map(|n| n.label.as_str()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let results = run_extractor(extractor, &distinct);
    let memo: HashMap<&str, &Result<Vec<EntityOccurrence>, ServiceError>> =
        distinct.iter().copied().zip(results.iter()).collect();

    let mut report = ExtractionReport {
        labels_scanned: distinct.len(),
        ..Default::default()
    };
    for (label, result) in distinct.iter().zip(&results) {
        if let Err(e) = result {
            report.failures += 1;
            report.issues.push(format!("{label:?}: {e}"));
        }
    }
    let mut entity_nodes = std::collections::BTreeSet::new();
    for node in &nodes {
        let Ok(occurrences) = memo[node.label.as_str()] else {
            continue;
        };
        if occurrences.is_empty() {
            continue;
        }
        let keys: Vec<EntityKey> = occurrences
            .iter()
            .map(|o| EntityKey::surface(o.entity_type, &o.surface))
            .collect();
        let attached = attach_entities(graph, node.id, occurrences, &keys)?;
        report.occurrences += occurrences.len();
        for ((entity, _), occ) in attached.iter().zip(occurrences) {
            if entity_nodes.insert(*entity) {
                match occ.entity_type {
                    EntityType::Person => report.persons += 1,
                    EntityType::Location => report.locations += 1,
                    EntityType::Organization => report.organizations += 1,
                }
            }
        }
        report.annotations.push(Annotation {
            node: node.id,
            text: node.label.clone(),
            occurrences: occurrences.clone(),
            entities: attached.into_iter().map(|(e, _)| e).collect(),
        });
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

#[cfg(feature = "parallel")]
fn run_extractor(
    extractor: &dyn Extractor,
    labels: &[&str],
) -> Vec<Result<Vec<EntityOccurrence>, ServiceError>> {
    use rayon::prelude::*;
    labels.par_iter().map(|l| extractor.extract(l)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_extractor(
    extractor: &dyn Extractor,
    labels: &[&str],
) -> Vec<Result<Vec<EntityOccurrence>, ServiceError>> {
    labels.iter().map(|l| extractor.extract(l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DataModel;
    use crate::typing::LabelPath;

    fn gazetteer() -> Gazetteer {
        Gazetteer::new([
            ("Marrakech", EntityType::Location, 0.9),
            ("P. Balkany", EntityType::Person, 0.7),
        ])
        .unwrap()
    }

    #[test]
    fn shared_entity_across_datasets() {
        let mut g = Graph::in_memory();
        let csv = g.register_dataset(DataModel::Relational, None).unwrap();
        let text = g.register_dataset(DataModel::Text, None).unwrap();
        let v = g
            .value_node("Marrakech", &LabelPath::root(csv).child("city"))
            .unwrap()
            .id;
        let seg = g
            .add_node("Un riad à Marrakech.", NodeKind::TextSegmentNode, text)
            .unwrap();
        let report = extract_graph(&mut g, &gazetteer()).unwrap();
        assert_eq!(report.locations, 1);
        assert_eq!(report.occurrences, 2);
        let edges: Vec<_> = g
            .edges()
            .unwrap()
            .into_iter()
            .filter(|e| e.label == labels::EXTRACT_LOCATION)
            .collect();
        assert_eq!(edges.len(), 2);
        assert_eq!(edges[0].target, edges[1].target);
        assert!(edges.iter().any(|e| e.source == v) && edges.iter().any(|e| e.source == seg));
        assert_eq!(edges[0].confidence, 0.9);
    }

    #[test]
    fn two_occurrences_in_one_label() {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Text, None).unwrap();
        g.add_node("Marrakech, puis Marrakech.", NodeKind::TextSegmentNode, ds)
            .unwrap();
        let report = extract_graph(&mut g, &gazetteer()).unwrap();
        assert_eq!((report.occurrences, report.locations), (2, 1));
        let entities = g
            .nodes()
            .unwrap()
            .into_iter()
            .filter(|n| n.kind.is_entity())
            .count();
        assert_eq!(entities, 1);
    }

    #[test]
    fn confidence_passes_through() {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Text, None).unwrap();
        let n = g.add_node("x", NodeKind::ValueNode, ds).unwrap();
        let occ = EntityOccurrence::within("x", 0, 1, EntityType::Person, 0.7).unwrap();
        let key = EntityKey::surface(EntityType::Person, "x");
        let out = attach_entities(&mut g, n, &[occ], &[key]).unwrap();
        let edge = g
            .edges()
            .unwrap()
            .into_iter()
            .find(|e| e.id == out[0].1)
            .unwrap();
        assert_eq!(edge.confidence, 0.7);
        assert_eq!(edge.label, labels::EXTRACT_PERSON);
    }

    #[test]
    fn person_keys_use_first_last_order() {
        assert_eq!(
            EntityKey::surface(EntityType::Person, "Balkany,  Patrick"),
            EntityKey::surface(EntityType::Person, "patrick BALKANY")
        );
        assert_ne!(
            EntityKey::surface(EntityType::Person, "Paris"),
            EntityKey::surface(EntityType::Location, "Paris")
        );
    }

    #[test]
    fn occurrence_validation() {
        assert!(EntityOccurrence::within("Macron", 0, 7, EntityType::Person, 0.5).is_err());
        assert!(EntityOccurrence::within("Macron", 2, 2, EntityType::Person, 0.5).is_err());
        assert!(EntityOccurrence::within("Macron", 0, 6, EntityType::Person, 1.5).is_err());
        let o = EntityOccurrence::within("Élysée Macron", 7, 13, EntityType::Person, 0.98).unwrap();
        assert_eq!(o.surface, "Macron");
    }
}
