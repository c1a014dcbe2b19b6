//! Persistence of the Nodes, Edges and Similar relations behind a buffered store.
//!
//! Every mutation goes through a [`WriteBuffer`]; it is applied to the backend
//! as one batch when the buffer reaches its capacity or on [`GraphStore::flush`].
//! Point reads consult the buffer first, scans only see flushed state.

mod buffer;
mod cache;
#[cfg(feature = "disk")]
mod disk;
mod export;
mod memory;

use std::num::NonZeroUsize;

pub use buffer::{Batch, WriteBuffer};
pub use cache::LabelCache;
#[cfg(feature = "disk")]
pub use disk::DiskBackend;
pub use export::{export_graph, import_graph, Record};
pub use memory::MemoryBackend;

use crate::error::StoreError;
use crate::model::{Dataset, Edge, EdgeId, Node, NodeId, Similar};

pub type Result<T> = std::result::Result<T, StoreError>;

/// Row counts of the stored relations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Counts {
    pub nodes: u64,
    pub edges: u64,
    pub similar: u64,
    pub datasets: u64,
}

/// Durable layer under the write buffer.
pub trait Backend: Send {
    fn apply(&mut self, batch: Batch) -> Result<()>;
    fn node(&self, id: NodeId) -> Result<Option<Node>>;
    fn contains_node(&self, id: NodeId) -> Result<bool> {
        Ok(self.node(id)?.is_some())
    }
    fn lookup_key(&self, key: &str) -> Result<Option<NodeId>>;
    fn meta(&self, key: &str) -> Result<Option<String>>;
    fn nodes(&self) -> Result<Vec<Node>>;
    fn edges(&self) -> Result<Vec<Edge>>;
    fn similar(&self) -> Result<Vec<Similar>>;
    fn datasets(&self) -> Result<Vec<Dataset>>;
    fn keys(&self) -> Result<Vec<(String, NodeId)>>;
    fn counts(&self) -> Result<Counts>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StoreStats {
    pub counts: Counts,
    pub buffered: usize,
    pub flushes: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
}

pub struct GraphStore {
    backend: Box<dyn Backend>,
    buffer: WriteBuffer,
    cache: LabelCache,
    flushes: u64,
}

pub const DEFAULT_BUFFER_SIZE: usize = 50_000;
pub const DEFAULT_CACHE_SIZE: usize = 100_000;

impl GraphStore {
    pub fn new(backend: Box<dyn Backend>, buffer_size: usize, cache_size: usize) -> Self {
        let cache_size = NonZeroUsize::new(cache_size).unwrap_or(NonZeroUsize::MIN);
        Self {
            backend,
            buffer: WriteBuffer::new(buffer_size),
            cache: LabelCache::new(cache_size),
            flushes: 0,
        }
    }

    pub fn in_memory() -> Self {
        Self::new(
            Box::new(MemoryBackend::default()),
            DEFAULT_BUFFER_SIZE,
            DEFAULT_CACHE_SIZE,
        )
    }

    #[cfg(feature = "disk")]
    pub fn open_dir(dir: &std::path::Path, buffer_size: usize, cache_size: usize) -> Result<Self> {
        Ok(Self::new(
            Box::new(DiskBackend::open(dir)?),
            buffer_size,
            cache_size,
        ))
    }

    pub fn buffer_capacity(&self) -> usize {
        self.buffer.capacity()
    }

    fn spill_if_full(&mut self) -> Result<()> {
        if self.buffer.is_full() {
            self.flush()?;
        }
        Ok(())
    }

    pub fn contains_node(&self, id: NodeId) -> Result<bool> {
        if self.buffer.node(id).is_some() {
            return Ok(true);
        }
        self.backend.contains_node(id)
    }

    pub fn put_dataset(&mut self, dataset: Dataset) -> Result<()> {
        self.buffer.push_dataset(dataset);
        self.spill_if_full()
    }

    pub fn put_node(&mut self, node: Node) -> Result<NodeId> {
        let id = node.id;
        if self.contains_node(id)? {
            return Err(StoreError::Constraint(format!("duplicate node id {id}")));
        }
        self.buffer.push_node(node);
        self.spill_if_full()?;
        Ok(id)
    }

    pub fn put_edge(&mut self, edge: Edge) -> Result<EdgeId> {
        if !(0.0..=1.0).contains(&edge.confidence) {
            return Err(StoreError::Constraint(format!(
                "edge {} confidence {} outside [0, 1]",
                edge.id, edge.confidence
            )));
        }
        for end in [edge.source, edge.target] {
            if !self.contains_node(end)? {
                return Err(StoreError::UnknownNode(end));
            }
        }
        let id = edge.id;
        self.buffer.push_edge(edge);
        self.spill_if_full()?;
        Ok(id)
    }

    /// Records a similarity; the pair is stored once with the smaller id first.
    pub fn put_similar(&mut self, record: Similar) -> Result<()> {
        if !(0.0..=1.0).contains(&record.similarity) {
            return Err(StoreError::Constraint(format!(
                "similarity {} outside [0, 1]",
                record.similarity
            )));
        }
        if record.source == record.target {
            return Err(StoreError::Constraint(
                "similarity of a node with itself".into(),
            ));
        }
        for end in [record.source, record.target] {
            if !self.contains_node(end)? {
                return Err(StoreError::UnknownNode(end));
            }
        }
        self.buffer.push_similar(Similar::new(
            record.source,
            record.target,
            record.similarity,
        ));
        self.spill_if_full()
    }

    pub fn set_representative(&mut self, node: NodeId, rep: NodeId) -> Result<()> {
        if !self.contains_node(node)? {
            return Err(StoreError::UnknownNode(node));
        }
        if !self.contains_node(rep)? {
            return Err(StoreError::UnknownNode(rep));
        }
        if self
            .get_node(node)?
            .is_some_and(|n| n.representative == rep)
        {
            return Ok(());
        }
        self.buffer.set_representative(node, rep);
        self.spill_if_full()
    }

    pub fn get_node(&self, id: NodeId) -> Result<Option<Node>> {
        if let Some(n) = self.buffer.node(id) {
            return Ok(Some(n.clone()));
        }
        let mut node = self.backend.node(id)?;
        if let (Some(n), Some(rep)) = (node.as_mut(), self.buffer.representative(id)) {
            n.representative = rep;
        }
        Ok(node)
    }

    /// Resolves a factorization key: cache, then buffer, then the backend.
    pub fn lookup_key(&mut self, key: &str) -> Result<Option<NodeId>> {
        if let Some(id) = self.cache.get(key) {
            return Ok(Some(id));
        }
        let found = match self.buffer.key(key) {
            Some(id) => Some(id),
            None => self.backend.lookup_key(key)?,
        };
        if let Some(id) = found {
            self.cache.put(key.to_string(), id);
        }
        Ok(found)
    }

    pub fn bind_key(&mut self, key: String, node: NodeId) -> Result<()> {
        self.cache.put(key.clone(), node);
        self.buffer.bind_key(key, node);
        self.spill_if_full()
    }

    pub fn put_meta(&mut self, key: &str, value: String) -> Result<()> {
        self.buffer.put_meta(key.to_string(), value);
        self.spill_if_full()
    }

    pub fn meta(&self, key: &str) -> Result<Option<String>> {
        if let Some(v) = self.buffer.meta(key) {
            return Ok(Some(v.to_string()));
        }
        self.backend.meta(key)
    }

    pub fn flush(&mut self) -> Result<()> {
        if self.buffer.is_empty() {
            return Ok(());
        }
        let batch = self.buffer.take();
        self.backend.apply(batch)?;
        self.flushes += 1;
        Ok(())
    }

    pub fn scan_nodes(&self) -> Result<Vec<Node>> {
        self.backend.nodes()
    }

    pub fn scan_edges(&self) -> Result<Vec<Edge>> {
        self.backend.edges()
    }

    pub fn scan_similar(&self) -> Result<Vec<Similar>> {
        self.backend.similar()
    }

    pub fn scan_datasets(&self) -> Result<Vec<Dataset>> {
        self.backend.datasets()
    }

    pub fn scan_keys(&self) -> Result<Vec<(String, NodeId)>> {
        self.backend.keys()
    }

    pub fn stats(&self) -> Result<StoreStats> {
        Ok(StoreStats {
            counts: self.backend.counts()?,
            buffered: self.buffer.len(),
            flushes: self.flushes,
            cache_hits: self.cache.hits(),
            cache_misses: self.cache.misses(),
        })
    }
}

impl Default for GraphStore {
    fn default() -> Self {
        Self::in_memory()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DatasetId, NodeKind};

    fn node(id: u64) -> Node {
        Node::new(
            NodeId(id),
            format!("n{id}"),
            NodeKind::ValueNode,
            DatasetId(0),
        )
    }

    fn edge(id: u64, s: u64, t: u64, c: f64) -> Edge {
        Edge {
            id: EdgeId(id),
            source: NodeId(s),
            target: NodeId(t),
            label: "x".into(),
            dataset: DatasetId(0),
            confidence: c,
        }
    }

    #[test]
    fn writes_become_visible_after_flush() {
        let mut store = GraphStore::new(Box::new(MemoryBackend::default()), 100, 10);
        store.put_node(node(1)).unwrap();
        store.put_node(node(2)).unwrap();
        store.put_edge(edge(3, 1, 2, 1.0)).unwrap();
        assert!(store.get_node(NodeId(1)).unwrap().is_some());
        assert_eq!(store.scan_nodes().unwrap().len(), 0);
        store.flush().unwrap();
        assert_eq!(store.scan_nodes().unwrap().len(), 2);
        assert_eq!(store.scan_edges().unwrap().len(), 1);
    }

    #[test]
    fn spill_happens_exactly_at_capacity() {
        let mut store = GraphStore::new(Box::new(MemoryBackend::default()), 3, 10);
        store.put_node(node(1)).unwrap();
        store.put_node(node(2)).unwrap();
        assert_eq!(store.stats().unwrap().flushes, 0);
        assert_eq!(store.stats().unwrap().buffered, 2);
        store.put_node(node(3)).unwrap();
        let stats = store.stats().unwrap();
        assert_eq!(stats.flushes, 1);
        assert_eq!(stats.buffered, 0);
        assert_eq!(stats.counts.nodes, 3);
    }

    #[test]
    fn rejects_bad_edges() {
        let mut store = GraphStore::in_memory();
        store.put_node(node(1)).unwrap();
        store.put_node(node(2)).unwrap();
        assert!(matches!(
            store.put_edge(edge(3, 1, 2, 1.5)),
            Err(StoreError::Constraint(_))
        ));
        assert!(matches!(
            store.put_edge(edge(3, 1, 9, 1.0)),
            Err(StoreError::UnknownNode(NodeId(9)))
        ));
        assert!(store.put_node(node(1)).is_err());
    }

    #[test]
    fn similar_pairs_are_canonical_and_deduplicated() {
        let mut store = GraphStore::in_memory();
        store.put_node(node(1)).unwrap();
        store.put_node(node(2)).unwrap();
        store
            .put_similar(Similar::new(NodeId(2), NodeId(1), 0.85))
            .unwrap();
        store
            .put_similar(Similar {
                source: NodeId(2),
                target: NodeId(1),
                similarity: 0.85,
            })
            .unwrap();
        store.flush().unwrap();
        store
            .put_similar(Similar::new(NodeId(1), NodeId(2), 0.85))
            .unwrap();
        store.flush().unwrap();
        assert_eq!(
            store.scan_similar().unwrap(),
            vec![Similar {
                source: NodeId(1),
                target: NodeId(2),
                similarity: 0.85
            }]
        );
    }

    #[test]
    fn empty_flush_is_a_noop() {
        let mut store = GraphStore::in_memory();
        store.flush().unwrap();
        assert_eq!(store.stats().unwrap().flushes, 0);
    }

    #[test]
    fn representatives_update_buffered_and_flushed_nodes() {
        let mut store = GraphStore::in_memory();
        for id in [3, 7, 9] {
            store.put_node(node(id)).unwrap();
        }
        store.set_representative(NodeId(7), NodeId(3)).unwrap();
        store.flush().unwrap();
        store.set_representative(NodeId(9), NodeId(3)).unwrap();
        assert_eq!(
            store.get_node(NodeId(9)).unwrap().unwrap().representative,
            NodeId(3)
        );
        store.set_representative(NodeId(9), NodeId(3)).unwrap();
        store.flush().unwrap();
        let reps: Vec<_> = store
            .scan_nodes()
            .unwrap()
            .iter()
            .map(|n| n.representative.0)
            .collect();
        assert_eq!(reps, vec![3, 3, 3]);
        assert!(matches!(
            store.set_representative(NodeId(42), NodeId(3)),
            Err(StoreError::UnknownNode(NodeId(42)))
        ));
    }

    #[test]
    fn key_lookup_survives_cache_eviction() {
        let mut store = GraphStore::new(Box::new(MemoryBackend::default()), 2, 1);
        for id in 1..=4 {
            store.put_node(node(id)).unwrap();
            store.bind_key(format!("k{id}"), NodeId(id)).unwrap();
        }
        for id in 1..=4 {
            assert_eq!(
                store.lookup_key(&format!("k{id}")).unwrap(),
                Some(NodeId(id))
            );
        }
        assert_eq!(store.lookup_key("missing").unwrap(), None);
    }
}
