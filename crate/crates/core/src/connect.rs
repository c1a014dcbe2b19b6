//! Shortest connections between labels, for demonstration.
//!
//! The search is a breadth-first traversal over edges taken in either
//! direction, similarity records and equivalence classes. Dataset nodes are
//! not traversed.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::Graph;
use crate::model::{normalize_label, DatasetId, EdgeId, Node, NodeId, NodeKind};

pub const DEFAULT_MAX_HOPS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Link {
    Edge {
        id: EdgeId,
        label: String,
        confidence: f64,
        forward: bool,
    },
    Similar {
        similarity: f64,
    },
    Equivalent,
}

impl Link {
    pub fn confidence(&self) -> f64 {
        match self {
            Link::Edge { confidence, .. } => *confidence,
            Link::Similar { similarity } => *similarity,
            Link::Equivalent => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathNode {
    pub id: NodeId,
    pub label: String,
    pub kind: NodeKind,
    pub dataset: DatasetId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphPath {
    pub nodes: Vec<PathNode>,
    /// `links[i]` joins `nodes[i]` and `nodes[i + 1]`.
    pub links: Vec<Link>,
}

impl GraphPath {
    pub fn hops(&self) -> usize {
        self.links.len()
    }

    pub fn datasets(&self) -> BTreeSet<DatasetId> {
        self.nodes.iter().map(|n| n.dataset).collect()
    }
}

impl std::fmt::Display for GraphPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |n: &PathNode| {
            if n.label.is_empty() {
                format!("[{} #{}]", n.kind.as_str(), n.id)
            } else {
                format!("{:?}", n.label)
            }
        };
        write!(f, "{}", show(&self.nodes[0]))?;
        for (link, node) in self.links.iter().zip(&self.nodes[1..]) {
            match link {
                Link::Edge {
                    label,
                    confidence,
                    forward,
                    ..
                } => {
                    let label = if label.is_empty() { "ε" } else { label };
                    if *forward {
                        write!(f, " -[{label} {confidence}]-> ")?;
                    } else {
                        write!(f, " <-[{label} {confidence}]- ")?;
                    }
                }
                Link::Similar { similarity } => write!(f, " ~[{similarity}]~ ")?,
                Link::Equivalent => write!(f, " == ")?,
            }
            write!(f, "{}", show(node))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum Connection {
    /// Some query label matches no node.
    NoMatch {
        labels: Vec<String>,
    },
    /// Both labels match, but no path within the hop limit.
    NoPath,
    Path(GraphPath),
}

/// Whether `node` answers the label query `wanted` (already normalized).
fn matches_label(node: &Node, wanted: &str) -> bool {
    if node.normalized_label == wanted {
        return true;
    }
    node.kind == NodeKind::UriNode
        && normalize_label(&uri_local_name(&node.label).replace('_', " ")) == wanted
}

fn uri_local_name(uri: &str) -> &str {
    uri.trim_end_matches('/')
        .rsplit(['/', '#'])
        .next()
        .unwrap_or(uri)
}

/// Finds a shortest path from a node labeled `from` to one labeled `to`.
pub fn connect(
    graph: &mut Graph,
    from: &str,
    to: &str,
    max_hops: usize,
) -> Result<Connection, GraphError> {
    let nodes = graph.nodes()?;
    let (from, to) = (normalize_label(from), normalize_label(to));
    let sources: Vec<NodeId> = nodes
        .iter()
        .filter(|n| matches_label(n, &from))
        .map(|n| n.id)
        .collect();
    let targets: BTreeSet<NodeId> = nodes
        .iter()
        .filter(|n| matches_label(n, &to))
        .map(|n| n.id)
        .collect();
    let mut missing = Vec::new();
    if sources.is_empty() {
        missing.push(from.clone());
    }
    if targets.is_empty() {
        missing.push(to.clone());
    }
    if !missing.is_empty() {
        return Ok(Connection::NoMatch { labels: missing });
    }

    let by_id: HashMap<NodeId, &Node> = nodes.iter().map(|n| (n.id, n)).collect();
    let blocked = |id: &NodeId| {
        by_id
            .get(id)
            .is_none_or(|n| n.kind == NodeKind::DatasetNode)
    };
    let mut adjacency: HashMap<NodeId, BTreeMap<NodeId, Link>> = HashMap::new();
    let mut add = |a: NodeId, b: NodeId, link: Link| {
        adjacency.entry(a).or_default().entry(b).or_insert(link);
    };
    for e in graph.store().scan_edges()? {
        if blocked(&e.source) || blocked(&e.target) {
            continue;
        }
        let link = |forward| Link::Edge {
            id: e.id,
            label: e.label.clone(),
            confidence: e.confidence,
            forward,
        };
        add(e.source, e.target, link(true));
        add(e.target, e.source, link(false));
    }
    for s in graph.store().scan_similar()? {
        add(
            s.source,
            s.target,
            Link::Similar {
                similarity: s.similarity,
            },
        );
        add(
            s.target,
            s.source,
            Link::Similar {
                similarity: s.similarity,
            },
        );
    }
    for members in graph.equivalence().classes().values() {
        for &a in members {
            for &b in members {
                if a != b {
                    add(a, b, Link::Equivalent);
                }
            }
        }
    }

    let mut parent: HashMap<NodeId, Option<(NodeId, Link)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for s in sources {
        parent.insert(s, None);
        queue.push_back((s, 0));
    }
    while let Some((node, depth)) = queue.pop_front() {
        if targets.contains(&node) {
            let mut ids = vec![node];
            let mut links = Vec::new();
            let mut cur = node;
            while let Some(Some((prev, link))) = parent.get(&cur) {
                links.push(link.clone());
                ids.push(*prev);
                cur = *prev;
            }
            ids.reverse();
            links.reverse();
            let nodes = ids
                .iter()
                .map(|id| {
                    let n = by_id[id];
                    PathNode {
                        id: n.id,
                        label: n.label.clone(),
                        kind: n.kind,
                        dataset: n.dataset,
                    }
                })
                .collect();
            return Ok(Connection::Path(GraphPath { nodes, links }));
        }
        if depth == max_hops {
            continue;
        }
        for (next, link) in adjacency.get(&node).into_iter().flatten() {
            if !parent.contains_key(next) {
                parent.insert(*next, Some((node, link.clone())));
                queue.push_back((*next, depth + 1));
            }
        }
    }
    Ok(Connection::NoPath)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DataModel;
    use crate::typing::LabelPath;

    #[test]
    fn same_node_is_a_zero_length_path() {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Json, None).unwrap();
        g.value_node("Paris", &LabelPath::root(ds)).unwrap();
        match connect(&mut g, "paris", "Paris", DEFAULT_MAX_HOPS).unwrap() {
            Connection::Path(p) => assert_eq!(p.hops(), 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_match_differs_from_no_path() {
        let mut g = Graph::in_memory();
        let a = g.register_dataset(DataModel::Json, None).unwrap();
        let b = g.register_dataset(DataModel::Json, None).unwrap();
        g.add_node("x", NodeKind::ValueNode, a).unwrap();
        g.add_node("y", NodeKind::ValueNode, b).unwrap();
        assert_eq!(connect(&mut g, "x", "y", 10).unwrap(), Connection::NoPath);
        assert!(
            matches!(connect(&mut g, "x", "z", 10).unwrap(), Connection::NoMatch { labels } if labels == ["z"])
        );
    }

    #[test]
    fn traverses_backwards_and_through_equivalence() {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Json, None).unwrap();
        let a = g.add_node("a", NodeKind::ValueNode, ds).unwrap();
        let m = g.add_node("", NodeKind::MapNode, ds).unwrap();
        let b1 = g.add_node("b", NodeKind::ValueNode, ds).unwrap();
        let b2 = g.add_node("b", NodeKind::ValueNode, ds).unwrap();
        let c = g.add_node("c", NodeKind::ValueNode, ds).unwrap();
        g.add_edge(m, a, "k", ds, 1.0).unwrap();
        g.add_edge(m, b1, "k", ds, 1.0).unwrap();
        g.add_edge(b2, c, "k", ds, 1.0).unwrap();
        g.equivalence_mut().union(b1, b2);
        let Connection::Path(p) = connect(&mut g, "a", "c", 10).unwrap() else {
            panic!()
        };
        assert_eq!(p.hops(), 4);
        assert_eq!(p.links[2], Link::Equivalent);
        assert_eq!(connect(&mut g, "a", "c", 3).unwrap(), Connection::NoPath);
    }

    #[test]
    fn uri_local_names_match() {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Rdf, None).unwrap();
        g.uri_node("http://dbpedia.org/resource/Central_African_Republic", ds)
            .unwrap();
        assert!(matches!(
            connect(
                &mut g,
                "central african republic",
                "Central African Republic",
                1
            )
            .unwrap(),
            Connection::Path(_)
        ));
    }
}
