//! Line-delimited JSON dump of a whole store.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{GraphStore, Result};
use crate::error::StoreError;
use crate::model::{Dataset, DatasetId, Edge, Node, NodeId, Similar};

pub const FORMAT: &str = "integraph-lines";
pub const VERSION: u32 = 1;
pub(crate) const NEXT_ID_META: &str = "next_id";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rec", rename_all = "lowercase")]
pub enum Record {
    #[serde(rename_all = "camelCase")]
    Header {
        format: String,
        version: u32,
        next_id: u64,
    },
    Dataset(Dataset),
    Node(Node),
    Edge(Edge),
    Similar(Similar),
    Key {
        key: String,
        node: NodeId,
    },
}

fn next_id(
    store: &GraphStore,
    nodes: &[Node],
    edges: &[Edge],
    datasets: &[Dataset],
) -> Result<u64> {
    if let Some(v) = store.meta(NEXT_ID_META)? {
        if let Ok(n) = v.parse() {
            return Ok(n);
        }
    }
    let max = nodes
        .iter()
        .map(|n| n.id.0)
        .chain(edges.iter().map(|e| e.id.0))
        .chain(datasets.iter().map(|d| d.id.0))
        .max();
    Ok(max.map_or(1, |m| m + 1))
}

/// Writes every flushed record of `store` to `sink`, header first.
pub fn export_graph(store: &GraphStore, mut sink: impl Write) -> Result<()> {
    let datasets = store.scan_datasets()?;
    let nodes = store.scan_nodes()?;
    let edges = store.scan_edges()?;
    let header = Record::Header {
        format: FORMAT.into(),
        version: VERSION,
        next_id: next_id(store, &nodes, &edges, &datasets)?,
    };
    let mut write = |r: Record| -> Result<()> {
        serde_json::to_writer(&mut sink, &r).map_err(|e| StoreError::Backend(e.to_string()))?;
        sink.write_all(b"\n")?;
        Ok(())
    };
    write(header)?;
    for d in datasets {
        write(Record::Dataset(d))?;
    }
    for n in nodes {
        write(Record::Node(n))?;
    }
    for e in edges {
        write(Record::Edge(e))?;
    }
    for s in store.scan_similar()? {
        write(Record::Similar(s))?;
    }
    for (key, node) in store.scan_keys()? {
        write(Record::Key { key, node })?;
    }
    Ok(())
}

/// Loads an export into `store`, validating ranges and references.
pub fn import_graph(source: impl BufRead, mut store: GraphStore) -> Result<GraphStore> {
    let malformed = |line: usize, message: String| StoreError::Malformed { line, message };
    let mut datasets: HashSet<DatasetId> = HashSet::new();
    let mut dataset_nodes: Vec<(usize, NodeId)> = Vec::new();
    let mut node_datasets: Vec<(usize, DatasetId)> = Vec::new();
    let mut saw_header = false;
    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| malformed(lineno, e.to_string()))?;
        let reject = |e: StoreError| malformed(lineno, e.to_string());
        match record {
            Record::Header {
                format,
                version,
                next_id,
            } => {
                if saw_header || lineno != 1 {
                    return Err(malformed(lineno, "unexpected header".into()));
                }
                if format != FORMAT || version != VERSION {
                    return Err(malformed(
                        lineno,
                        format!("unsupported format {format} v{version}"),
                    ));
                }
                store
                    .put_meta(NEXT_ID_META, next_id.to_string())
                    .map_err(reject)?;
                saw_header = true;
            }
            _ if !saw_header => return Err(malformed(lineno, "missing header".into())),
            Record::Dataset(d) => {
                if let Some(p) = &d.prov {
                    if url::Url::parse(p).is_err() {
                        return Err(malformed(lineno, format!("malformed provenance {p:?}")));
                    }
                }
                datasets.insert(d.id);
                dataset_nodes.push((lineno, d.node));
                store.put_dataset(d).map_err(reject)?;
            }
            Record::Node(n) => {
                node_datasets.push((lineno, n.dataset));
                store.put_node(n).map_err(reject)?;
            }
            Record::Edge(e) => {
                if !datasets.contains(&e.dataset) {
                    return Err(malformed(lineno, format!("unknown dataset {}", e.dataset)));
                }
                store.put_edge(e).map_err(reject)?;
            }
            Record::Similar(s) => store.put_similar(s).map_err(reject)?,
            Record::Key { key, node } => {
                if !store.contains_node(node)? {
                    return Err(malformed(lineno, format!("key for unknown node {node}")));
                }
                store.bind_key(key, node).map_err(reject)?
            }
        }
    }
    if !saw_header {
        return Err(malformed(1, "empty input".into()));
    }
    for (lineno, ds) in node_datasets {
        if !datasets.contains(&ds) {
            return Err(malformed(
                lineno,
                format!("node references unknown dataset {ds}"),
            ));
        }
    }
    for (lineno, node) in dataset_nodes {
        if !store.contains_node(node)? {
            return Err(malformed(lineno, format!("dataset node {node} missing")));
        }
    }
    // representatives must point at stored nodes
    store.flush()?;
    for n in store.scan_nodes()? {
        if !store.contains_node(n.representative)? {
            return Err(StoreError::Constraint(format!(
                "node {} has unknown representative {}",
                n.id, n.representative
            )));
        }
    }
    Ok(store)
}
