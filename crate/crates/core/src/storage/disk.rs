use std::path::Path;

use redb::{Database, ReadableDatabase, ReadableTable, ReadableTableMetadata, TableDefinition};
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{Backend, Batch, Counts, Result};
use crate::error::StoreError;
use crate::model::{Dataset, Edge, Node, NodeId, Similar};

const NODES: TableDefinition<u64, &[u8]> = TableDefinition::new("nodes");
const EDGES: TableDefinition<u64, &[u8]> = TableDefinition::new("edges");
const DATASETS: TableDefinition<u64, &[u8]> = TableDefinition::new("datasets");
const SIMILAR: TableDefinition<(u64, u64), f64> = TableDefinition::new("similar");
const KEYS: TableDefinition<&str, u64> = TableDefinition::new("keys");
const META: TableDefinition<&str, &str> = TableDefinition::new("meta");

/// Embedded persistent backend: one redb file per store directory.
pub struct DiskBackend {
    db: Database,
}

fn backend_err(e: impl std::fmt::Display) -> StoreError {
    StoreError::Backend(e.to_string())
}

fn encode<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    serde_json::to_vec(v).map_err(backend_err)
}

fn decode<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(backend_err)
}

impl DiskBackend {
    pub fn open(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let db = Database::create(dir.join("graph.redb")).map_err(backend_err)?;
        let txn = db.begin_write().map_err(backend_err)?;
        {
            txn.open_table(NODES).map_err(backend_err)?;
            txn.open_table(EDGES).map_err(backend_err)?;
            txn.open_table(DATASETS).map_err(backend_err)?;
            txn.open_table(SIMILAR).map_err(backend_err)?;
            txn.open_table(KEYS).map_err(backend_err)?;
            txn.open_table(META).map_err(backend_err)?;
        }
        txn.commit().map_err(backend_err)?;
        Ok(Self { db })
    }

    fn scan<T: DeserializeOwned>(&self, def: TableDefinition<u64, &[u8]>) -> Result<Vec<T>> {
        let txn = self.db.begin_read().map_err(backend_err)?;
        let table = txn.open_table(def).map_err(backend_err)?;
        let mut out = Vec::with_capacity(table.len().map_err(backend_err)? as usize);
        for row in table.iter().map_err(backend_err)? {
            let (_, v) = row.map_err(backend_err)?;
            out.push(decode(v.value())?);
        }
        Ok(out)
    }
}

impl Backend for DiskBackend {
    fn apply(&mut self, batch: Batch) -> Result<()> {
        let txn = self.db.begin_write().map_err(backend_err)?;
        {
            let mut datasets = txn.open_table(DATASETS).map_err(backend_err)?;
            for d in &batch.datasets {
                datasets
                    .insert(d.id.0, encode(d)?.as_slice())
                    .map_err(backend_err)?;
            }
            let mut nodes = txn.open_table(NODES).map_err(backend_err)?;
            for n in &batch.nodes {
                nodes
                    .insert(n.id.0, encode(n)?.as_slice())
                    .map_err(backend_err)?;
            }
            for &(node, rep) in &batch.representatives {
                let mut current: Node = {
                    let row = nodes
                        .get(node.0)
                        .map_err(backend_err)?
                        .ok_or(StoreError::UnknownNode(node))?;
                    decode(row.value())?
                };
                current.representative = rep;
                nodes
                    .insert(node.0, encode(&current)?.as_slice())
                    .map_err(backend_err)?;
            }
            let mut edges = txn.open_table(EDGES).map_err(backend_err)?;
            for e in &batch.edges {
                edges
                    .insert(e.id.0, encode(e)?.as_slice())
                    .map_err(backend_err)?;
            }
            let mut similar = txn.open_table(SIMILAR).map_err(backend_err)?;
            for s in &batch.similar {
                similar
                    .insert((s.source.0, s.target.0), s.similarity)
                    .map_err(backend_err)?;
            }
            let mut keys = txn.open_table(KEYS).map_err(backend_err)?;
            for (k, id) in &batch.keys {
                keys.insert(k.as_str(), id.0).map_err(backend_err)?;
            }
            let mut meta = txn.open_table(META).map_err(backend_err)?;
            for (k, v) in &batch.meta {
                meta.insert(k.as_str(), v.as_str()).map_err(backend_err)?;
            }
        }
        txn.commit().map_err(backend_err)
    }

    fn node(&self, id: NodeId) -> Result<Option<Node>> {
        let txn = self.db.begin_read().map_err(backend_err)?;
        let table = txn.open_table(NODES).map_err(backend_err)?;
        match table.get(id.0).map_err(backend_err)? {
            Some(row) => Ok(Some(decode(row.value())?)),
            None => Ok(None),
        }
    }

    fn contains_node(&self, id: NodeId) -> Result<bool> {
        let txn = self.db.begin_read().map_err(backend_err)?;
        let table = txn.open_table(NODES).map_err(backend_err)?;
        Ok(table.get(id.0).map_err(backend_err)?.is_some())
    }

    fn lookup_key(&self, key: &str) -> Result<Option<NodeId>> {
        let txn = self.db.begin_read().map_err(backend_err)?;
        let table = txn.open_table(KEYS).map_err(backend_err)?;
        Ok(table
            .get(key)
            .map_err(backend_err)?
            .map(|v| NodeId(v.value())))
    }

    fn meta(&self, key: &str) -> Result<Option<String>> {
        let txn = self.db.begin_read().map_err(backend_err)?;
        let table = txn.open_table(META).map_err(backend_err)?;
        Ok(table
            .get(key)
            .map_err(backend_err)?
            .map(|v| v.value().to_string()))
    }

    fn nodes(&self) -> Result<Vec<Node>> {
        self.scan(NODES)
    }

    fn edges(&self) -> Result<Vec<Edge>> {
        self.scan(EDGES)
    }

    fn datasets(&self) -> Result<Vec<Dataset>> {
        self.scan(DATASETS)
    }

    fn similar(&self) -> Result<Vec<Similar>> {
        let txn = self.db.begin_read().map_err(backend_err)?;
        let table = txn.open_table(SIMILAR).map_err(backend_err)?;
        let mut out = Vec::new();
        for row in table.iter().map_err(backend_err)? {
            let (k, v) = row.map_err(backend_err)?;
            let (a, b) = k.value();
            out.push(Similar {
                source: NodeId(a),
                target: NodeId(b),
                similarity: v.value(),
            });
        }
        Ok(out)
    }

    fn keys(&self) -> Result<Vec<(String, NodeId)>> {
        let txn = self.db.begin_read().map_err(backend_err)?;
        let table = txn.open_table(KEYS).map_err(backend_err)?;
        let mut out = Vec::new();
        for row in table.iter().map_err(backend_err)? {
            let (k, v) = row.map_err(backend_err)?;
            out.push((k.value().to_string(), NodeId(v.value())));
        }
        Ok(out)
    }

    fn counts(&self) -> Result<Counts> {
        let txn = self.db.begin_read().map_err(backend_err)?;
        let len = |def: TableDefinition<u64, &[u8]>| -> Result<u64> {
            txn.open_table(def)
                .map_err(backend_err)?
                .len()
                .map_err(backend_err)
        };
        Ok(Counts {
            nodes: len(NODES)?,
            edges: len(EDGES)?,
            datasets: len(DATASETS)?,
            similar: txn
                .open_table(SIMILAR)
                .map_err(backend_err)?
                .len()
                .map_err(backend_err)?,
        })
    }
}
