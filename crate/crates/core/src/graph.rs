//! The integrated graph: id allocation, datasets, node creation and edges.

use std::collections::{BTreeMap, HashMap};
use std::time::Duration;

use web_time::Instant;

use crate::error::{GraphError, StoreError};
use crate::matching::EquivalenceStore;
use crate::model::{
    labels, DataModel, Dataset, DatasetId, Edge, EdgeId, IdAllocator, Node, NodeId, NodeKind,
};
use crate::storage::{Counts, GraphStore};
use crate::typing::{
    classify_value, factorization_key, FactorKey, FactorizationPolicy, LabelPath, NullCodes,
};

pub type Result<T> = std::result::Result<T, GraphError>;

pub(crate) const NEXT_ID_META: &str = "next_id";

/// Time spent storing nodes and edges, for the cost model.
#[derive(Clone, Copy, Debug, Default)]
pub struct StoreTimings {
    pub nodes: Duration,
    pub edges: Duration,
    pub node_count: u64,
    pub edge_count: u64,
}

/// A freshly created or reused node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeRef {
    pub id: NodeId,
    pub created: bool,
}

pub struct Graph {
    store: GraphStore,
    ids: IdAllocator,
    datasets: BTreeMap<DatasetId, Dataset>,
    policy: FactorizationPolicy,
    nulls: NullCodes,
    equivalence: EquivalenceStore,
    /// (entity node, KB URI node) pairs already linked, built on first use.
    uri_links: Option<UriLinks>,
    timings: StoreTimings,
}

#[derive(Debug, Default)]
pub(crate) struct UriLinks {
    pub(crate) linked: HashMap<(NodeId, NodeId), EdgeId>,
    pub(crate) first_entity: HashMap<NodeId, NodeId>,
}

impl Graph {
    /// Opens a graph over `store`, resuming id allocation and equivalence state.
    pub fn open(store: GraphStore) -> Result<Self> {
        let next = match store.meta(NEXT_ID_META)? {
            Some(v) => v
                .parse()
                .map_err(|_| StoreError::Backend(format!("bad {NEXT_ID_META} {v:?}")))?,
            None => 1,
        };
        let datasets = store
            .scan_datasets()?
            .into_iter()
            .map(|d| (d.id, d))
            .collect();
        let mut equivalence = EquivalenceStore::new();
        for n in store.scan_nodes()? {
            if n.representative != n.id {
                equivalence.union(n.id, n.representative);
            }
        }
        Ok(Self {
            store,
            ids: IdAllocator::starting_at(next),
            datasets,
            policy: FactorizationPolicy::default(),
            nulls: NullCodes::defaults(),
            equivalence,
            uri_links: None,
            timings: StoreTimings::default(),
        })
    }

    pub fn in_memory() -> Self {
        Self::open(GraphStore::in_memory()).expect("empty in-memory store")
    }

    pub fn with_policy(mut self, policy: FactorizationPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_null_codes(mut self, nulls: NullCodes) -> Self {
        self.nulls = nulls;
        self
    }

    /// Policy applied to tree-shaped datasets; RDF always uses per-graph.
    pub fn policy(&self) -> FactorizationPolicy {
        self.policy
    }

    pub fn set_policy(&mut self, policy: FactorizationPolicy) {
        self.policy = policy;
    }

    pub fn null_codes(&self) -> &NullCodes {
        &self.nulls
    }

    pub fn set_null_codes(&mut self, nulls: NullCodes) {
        self.nulls = nulls;
    }

    pub fn store(&self) -> &GraphStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut GraphStore {
        &mut self.store
    }

    pub fn into_store(mut self) -> Result<GraphStore> {
        self.flush()?;
        Ok(self.store)
    }

    pub fn timings(&self) -> StoreTimings {
        self.timings
    }

    pub fn next_id(&self) -> u64 {
        self.ids.peek()
    }

    pub fn register_dataset(&mut self, model: DataModel, prov: Option<&str>) -> Result<DatasetId> {
        self.register_named_dataset(model, "", prov)
    }

    /// Creates the dataset node and, when `prov` is given, its provenance link.
    pub fn register_named_dataset(
        &mut self,
        model: DataModel,
        name: &str,
        prov: Option<&str>,
    ) -> Result<DatasetId> {
        if let Some(p) = prov {
            url::Url::parse(p).map_err(|_| GraphError::Provenance(p.to_string()))?;
        }
        let id = self.ids.dataset();
        let node = self.ids.node();
        let dataset = Dataset {
            id,
            model,
            prov: prov.map(str::to_string),
            node,
        };
        self.store.put_dataset(dataset.clone())?;
        self.datasets.insert(id, dataset);
        self.put_node(Node::new(node, name, NodeKind::DatasetNode, id))?;
        if let Some(p) = prov {
            let uri = self.uri_node(p, id)?;
            self.add_edge(node, uri.id, labels::PROV, id, 1.0)?;
        }
        Ok(id)
    }

    pub fn dataset(&self, id: DatasetId) -> Option<&Dataset> {
        self.datasets.get(&id)
    }

    pub fn datasets(&self) -> impl Iterator<Item = &Dataset> {
        self.datasets.values()
    }

    fn require_dataset(&self, id: DatasetId) -> Result<&Dataset> {
        self.datasets
            .get(&id)
            .ok_or(GraphError::UnknownDataset(id.0))
    }

    fn put_node(&mut self, node: Node) -> Result<NodeId> {
        let start = Instant::now();
        let id = self.store.put_node(node)?;
        self.timings.nodes += start.elapsed();
        self.timings.node_count += 1;
        Ok(id)
    }

    /// Always creates a new node.
    pub fn add_node(&mut self, label: &str, kind: NodeKind, dataset: DatasetId) -> Result<NodeId> {
        self.require_dataset(dataset)?;
        let id = self.ids.node();
        self.put_node(Node::new(id, label, kind, dataset))
    }

    /// Returns the node bound to `key`, creating and binding it if absent.
    pub fn keyed_node(
        &mut self,
        key: String,
        label: &str,
        kind: NodeKind,
        dataset: DatasetId,
    ) -> Result<NodeRef> {
        if let Some(id) = self.store.lookup_key(&key)? {
            return Ok(NodeRef { id, created: false });
        }
        let id = self.add_node(label, kind, dataset)?;
        self.store.bind_key(key, id)?;
        Ok(NodeRef { id, created: true })
    }

    /// URI nodes are unique per graph.
    pub fn uri_node(&mut self, uri: &str, dataset: DatasetId) -> Result<NodeRef> {
        let key = FactorKey::Graph {
            label: uri.to_string(),
            kind: NodeKind::UriNode,
        };
        self.keyed_node(key.encode(), uri, NodeKind::UriNode, dataset)
    }

    /// Creates or reuses the node for a leaf value reached along `path`.
    pub fn value_node(&mut self, label: &str, path: &LabelPath) -> Result<NodeRef> {
        let model = self.require_dataset(path.dataset)?.model;
        let kind = classify_value(label);
        if kind == NodeKind::UriNode {
            return self.uri_node(label, path.dataset);
        }
        let policy = if model.is_hierarchical() {
            self.policy
        } else {
            FactorizationPolicy::PerGraph
        };
        match factorization_key(policy, label, kind, &self.nulls, path) {
            Some(key) => self.keyed_node(key.encode(), label, kind, path.dataset),
            None => Ok(NodeRef {
                id: self.add_node(label, kind, path.dataset)?,
                created: true,
            }),
        }
    }

    pub fn add_edge(
        &mut self,
        source: NodeId,
        target: NodeId,
        label: &str,
        dataset: DatasetId,
        confidence: f64,
    ) -> Result<EdgeId> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(GraphError::InvalidConfidence(confidence));
        }
        self.require_dataset(dataset)?;
        let edge = Edge {
            id: self.ids.edge(),
            source,
            target,
            label: label.to_string(),
            dataset,
            confidence,
        };
        let start = Instant::now();
        let id = self.store.put_edge(edge).map_err(|e| match e {
            StoreError::UnknownNode(n) => GraphError::DanglingEndpoint(n),
            other => GraphError::Store(other),
        })?;
        self.timings.edges += start.elapsed();
        self.timings.edge_count += 1;
        Ok(id)
    }

    pub fn node(&self, id: NodeId) -> Result<Option<Node>> {
        Ok(self.store.get_node(id)?)
    }

    pub fn equivalence(&self) -> &EquivalenceStore {
        &self.equivalence
    }

    pub fn equivalence_mut(&mut self) -> &mut EquivalenceStore {
        &mut self.equivalence
    }

    pub(crate) fn uri_links(&mut self) -> Result<&mut UriLinks> {
        if self.uri_links.is_none() {
            self.flush()?;
            let mut links = UriLinks::default();
            for e in self.store.scan_edges()? {
                if e.label == labels::SAME_AS_URI {
                    links.linked.insert((e.source, e.target), e.id);
                    links.first_entity.entry(e.target).or_insert(e.source);
                }
            }
            self.uri_links = Some(links);
        }
        Ok(self.uri_links.as_mut().expect("initialized above"))
    }

    /// Writes the current representative of every node in a non-singleton class.
    pub fn persist_representatives(&mut self) -> Result<usize> {
        let nodes: Vec<NodeId> = self.equivalence.nodes().collect();
        let mut written = 0;
        for n in nodes {
            let rep = self.equivalence.find(n);
            let current = self.store.get_node(n)?.map(|n| n.representative);
            if current != Some(rep) {
                self.store.set_representative(n, rep)?;
                written += 1;
            }
        }
        Ok(written)
    }

    pub fn flush(&mut self) -> Result<()> {
        self.store
            .put_meta(NEXT_ID_META, self.ids.peek().to_string())?;
        self.store.flush()?;
        Ok(())
    }

    /// Flushes, then returns stored row counts.
    pub fn counts(&mut self) -> Result<Counts> {
        self.flush()?;
        Ok(self.store.stats()?.counts)
    }

    pub fn nodes(&mut self) -> Result<Vec<Node>> {
        self.flush()?;
        Ok(self.store.scan_nodes()?)
    }

    pub fn edges(&mut self) -> Result<Vec<Edge>> {
        self.flush()?;
        Ok(self.store.scan_edges()?)
    }

    /// Most frequent value labels, counted per occurrence in the input.
    pub fn frequent_values(&mut self, k: usize) -> Result<Vec<(String, u64)>> {
        let nodes = self.nodes()?;
        let edges = self.store.scan_edges()?;
        Ok(crate::typing::frequent_values(&nodes, &edges, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_with_provenance() {
        let mut g = Graph::in_memory();
        let ds = g
            .register_dataset(DataModel::Json, Some("https://nosdeputes.fr/deputes.json"))
            .unwrap();
        let nodes = g.nodes().unwrap();
        let edges = g.edges().unwrap();
        assert_eq!(nodes.len(), 2);
        assert_eq!(nodes[0].kind, NodeKind::DatasetNode);
        assert_eq!(nodes[1].kind, NodeKind::UriNode);
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0].label, labels::PROV);
        assert_eq!(edges[0].confidence, 1.0);
        assert_eq!(g.dataset(ds).unwrap().node, nodes[0].id);
    }

    #[test]
    fn dataset_without_provenance() {
        let mut g = Graph::in_memory();
        g.register_dataset(DataModel::Text, None).unwrap();
        assert_eq!(g.counts().unwrap().edges, 0);
        assert_eq!(g.counts().unwrap().nodes, 1);
    }

    #[test]
    fn datasets_get_distinct_ids() {
        let mut g = Graph::in_memory();
        let a = g.register_dataset(DataModel::Text, None).unwrap();
        let b = g.register_dataset(DataModel::Text, None).unwrap();
        assert_ne!(a, b);
        assert_ne!(g.dataset(a).unwrap().node, g.dataset(b).unwrap().node);
    }

    #[test]
    fn malformed_provenance_is_rejected() {
        let mut g = Graph::in_memory();
        assert!(matches!(
            g.register_dataset(DataModel::Json, Some("not a uri")),
            Err(GraphError::Provenance(_))
        ));
    }

    #[test]
    fn edge_validation() {
        let mut g = Graph::in_memory();
        let d = g.register_dataset(DataModel::Relational, None).unwrap();
        let n1 = g.add_node("t", NodeKind::TupleNode, d).unwrap();
        let n2 = g.add_node("v", NodeKind::ValueNode, d).unwrap();
        let before = g.counts().unwrap().edges;
        g.add_edge(n1, n2, "owner", d, 1.0).unwrap();
        assert_eq!(g.counts().unwrap().edges, before + 1);
        g.add_edge(n1, n2, labels::SAME_AS, d, 0.85).unwrap();
        assert!(matches!(
            g.add_edge(n1, n2, "x", d, 1.5),
            Err(GraphError::InvalidConfidence(_))
        ));
        assert!(matches!(
            g.add_edge(n1, NodeId(999), "x", d, 1.0),
            Err(GraphError::DanglingEndpoint(NodeId(999)))
        ));
    }

    #[test]
    fn shared_provenance_uri_is_one_node() {
        let mut g = Graph::in_memory();
        g.register_dataset(DataModel::Json, Some("http://a.org/x"))
            .unwrap();
        g.register_dataset(DataModel::Xml, Some("http://a.org/x"))
            .unwrap();
        let uris = g
            .nodes()
            .unwrap()
            .into_iter()
            .filter(|n| n.kind == NodeKind::UriNode)
            .count();
        assert_eq!(uris, 1);
    }

    #[test]
    fn reopening_resumes_ids_and_classes() {
        let mut g = Graph::in_memory();
        let d = g.register_dataset(DataModel::Text, None).unwrap();
        let a = g.add_node("a", NodeKind::ValueNode, d).unwrap();
        let b = g.add_node("a", NodeKind::ValueNode, d).unwrap();
        g.equivalence_mut().union(a, b);
        g.persist_representatives().unwrap();
        let next = g.next_id();
        let store = g.into_store().unwrap();
        let mut g = Graph::open(store).unwrap();
        assert_eq!(g.next_id(), next);
        assert_eq!(g.equivalence_mut().find(b), a);
        assert!(g.add_node("c", NodeKind::ValueNode, d).unwrap().0 >= next);
    }
}
