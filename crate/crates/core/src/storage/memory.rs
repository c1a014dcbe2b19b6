use std::collections::{BTreeMap, HashMap};

use super::{Backend, Batch, Counts, Result};
use crate::error::StoreError;
use crate::model::{Dataset, DatasetId, Edge, EdgeId, Node, NodeId, Similar};

/// Volatile backend; everything lives in ordered maps.
#[derive(Debug, Default)]
pub struct MemoryBackend {
    datasets: BTreeMap<DatasetId, Dataset>,
    nodes: BTreeMap<NodeId, Node>,
    edges: BTreeMap<EdgeId, Edge>,
    similar: BTreeMap<(NodeId, NodeId), f64>,
    keys: HashMap<String, NodeId>,
    meta: HashMap<String, String>,
}

impl Backend for MemoryBackend {
    fn apply(&mut self, batch: Batch) -> Result<()> {
        for d in batch.datasets {
            self.datasets.insert(d.id, d);
        }
        for n in batch.nodes {
            self.nodes.insert(n.id, n);
        }
        for e in batch.edges {
            self.edges.insert(e.id, e);
        }
        for s in batch.similar {
            self.similar.insert((s.source, s.target), s.similarity);
        }
        for (node, rep) in batch.representatives {
            self.nodes
                .get_mut(&node)
                .ok_or(StoreError::UnknownNode(node))?
                .representative = rep;
        }
        self.keys.extend(batch.keys);
        self.meta.extend(batch.meta);
        Ok(())
    }

    fn node(&self, id: NodeId) -> Result<Option<Node>> {
        Ok(self.nodes.get(&id).cloned())
    }

    fn contains_node(&self, id: NodeId) -> Result<bool> {
        Ok(self.nodes.contains_key(&id))
    }

    fn lookup_key(&self, key: &str) -> Result<Option<NodeId>> {
        Ok(self.keys.get(key).copied())
    }

    fn meta(&self, key: &str) -> Result<Option<String>> {
        Ok(self.meta.get(key).cloned())
    }

    fn nodes(&self) -> Result<Vec<Node>> {
        Ok(self.nodes.values().cloned().collect())
    }

    fn edges(&self) -> Result<Vec<Edge>> {
        Ok(self.edges.values().cloned().collect())
    }

    fn similar(&self) -> Result<Vec<Similar>> {
        Ok(self
            .similar
            .iter()
            .map(|(&(source, target), &similarity)| Similar {
                source,
                target,
                similarity,
            })
            .collect())
    }

    fn datasets(&self) -> Result<Vec<Dataset>> {
        Ok(self.datasets.values().cloned().collect())
    }

    fn keys(&self) -> Result<Vec<(String, NodeId)>> {
        let mut keys: Vec<_> = self.keys.iter().map(|(k, v)| (k.clone(), *v)).collect();
        keys.sort();
        Ok(keys)
    }

    fn counts(&self) -> Result<Counts> {
        Ok(Counts {
            nodes: self.nodes.len() as u64,
            edges: self.edges.len() as u64,
            similar: self.similar.len() as u64,
            datasets: self.datasets.len() as u64,
        })
    }
}
