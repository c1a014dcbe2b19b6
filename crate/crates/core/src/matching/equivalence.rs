use std::collections::{BTreeMap, HashMap};

use crate::model::NodeId;

/// Union-find over node ids, holding one entry per node in a non-singleton class.
///
/// The root of every class is its smallest node id, so representatives are
/// deterministic regardless of union order.
#[derive(Clone, Debug, Default)]
pub struct EquivalenceStore {
    parent: HashMap<NodeId, NodeId>,
}

impl EquivalenceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn find(&mut self, node: NodeId) -> NodeId {
        let mut root = node;
        while let Some(&p) = self.parent.get(&root) {
            if p == root {
                break;
            }
            root = p;
        }
        let mut cur = node;
        while let Some(&p) = self.parent.get(&cur) {
            if p == root {
                break;
            }
            self.parent.insert(cur, root);
            cur = p;
        }
        root
    }

    /// Read-only lookup without path compression.
    pub fn representative(&self, node: NodeId) -> NodeId {
        let mut root = node;
        while let Some(&p) = self.parent.get(&root) {
            if p == root {
                break;
            }
            root = p;
        }
        root
    }

    /// Merges the classes of `a` and `b`; returns the new representative.
    pub fn union(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return ra;
        }
        let (root, child) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(root, root);
        self.parent.insert(child, root);
        root
    }

    pub fn same_class(&mut self, a: NodeId, b: NodeId) -> bool {
        self.find(a) == self.find(b)
    }

    /// Number of stored entries (every member of a non-singleton class).
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.parent.keys().copied()
    }

    /// Non-singleton classes keyed by representative, members sorted.
    pub fn classes(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut out: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for &n in self.parent.keys() {
            out.entry(self.representative(n)).or_default().push(n);
        }
        for members in out.values_mut() {
            members.sort();
        }
        out
    }
}
