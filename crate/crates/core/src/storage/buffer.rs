use std::collections::HashMap;

use crate::model::{Dataset, Edge, Node, NodeId, Similar};

/// One unit of durable writes handed to a backend.
#[derive(Debug, Default)]
pub struct Batch {
    pub datasets: Vec<Dataset>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub similar: Vec<Similar>,
    /// Representative updates for nodes already in the backend.
    pub representatives: Vec<(NodeId, NodeId)>,
    pub keys: Vec<(String, NodeId)>,
    pub meta: Vec<(String, String)>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.datasets.len()
            + self.nodes.len()
            + self.edges.len()
            + self.similar.len()
            + self.representatives.len()
            + self.keys.len()
            + self.meta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Bounded in-memory staging area for writes.
#[derive(Debug)]
pub struct WriteBuffer {
    capacity: usize,
    datasets: Vec<Dataset>,
    nodes: HashMap<NodeId, Node>,
    node_order: Vec<NodeId>,
    edges: Vec<Edge>,
    similar: HashMap<(NodeId, NodeId), f64>,
    representatives: HashMap<NodeId, NodeId>,
    keys: HashMap<String, NodeId>,
    meta: HashMap<String, String>,
}

impl WriteBuffer {
    /// `capacity` of 0 is treated as 1.
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            datasets: Vec::new(),
            nodes: HashMap::new(),
            node_order: Vec::new(),
            edges: Vec::new(),
            similar: HashMap::new(),
            representatives: HashMap::new(),
            keys: HashMap::new(),
            meta: HashMap::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.datasets.len()
            + self.nodes.len()
            + self.edges.len()
            + self.similar.len()
            + self.representatives.len()
            + self.keys.len()
            + self.meta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.len() >= self.capacity
    }

    pub fn push_dataset(&mut self, d: Dataset) {
        self.datasets.push(d);
    }

    pub fn push_node(&mut self, n: Node) {
        self.node_order.push(n.id);
        self.nodes.insert(n.id, n);
    }

    pub fn push_edge(&mut self, e: Edge) {
        self.edges.push(e);
    }

    pub fn push_similar(&mut self, s: Similar) {
        self.similar.insert((s.source, s.target), s.similarity);
    }

    pub fn set_representative(&mut self, node: NodeId, rep: NodeId) {
        match self.nodes.get_mut(&node) {
            Some(n) => n.representative = rep,
            None => {
                self.representatives.insert(node, rep);
            }
        }
    }

    pub fn bind_key(&mut self, key: String, node: NodeId) {
        self.keys.insert(key, node);
    }

    pub fn put_meta(&mut self, key: String, value: String) {
        self.meta.insert(key, value);
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn representative(&self, id: NodeId) -> Option<NodeId> {
        self.representatives.get(&id).copied()
    }

    pub fn key(&self, key: &str) -> Option<NodeId> {
        self.keys.get(key).copied()
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.get(key).map(String::as_str)
    }

    /// Drains the buffer into a batch, preserving node insertion order.
    pub fn take(&mut self) -> Batch {
        let mut nodes = std::mem::take(&mut self.nodes);
        let order = std::mem::take(&mut self.node_order);
        let mut similar: Vec<Similar> = self
            .similar
            .drain()
            .map(|((a, b), s)| Similar::new(a, b, s))
            .collect();
        similar.sort_by_key(|s| (s.source, s.target));
        let mut representatives: Vec<_> = self.representatives.drain().collect();
        representatives.sort();
        let mut keys: Vec<_> = self.keys.drain().collect();
        keys.sort();
        let mut meta: Vec<_> = self.meta.drain().collect();
        meta.sort();
        Batch {
            datasets: std::mem::take(&mut self.datasets),
            nodes: order
                .into_iter()
                .filter_map(|id| nodes.remove(&id))
                .collect(),
            edges: std::mem::take(&mut self.edges),
            similar,
            representatives,
            keys,
            meta,
        }
    }
}
