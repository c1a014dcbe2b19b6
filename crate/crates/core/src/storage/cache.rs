use std::num::NonZeroUsize;

use lru::LruCache;

use crate::model::NodeId;

/// Bounded map from factorization key to node.
///
/// A miss is never authoritative: callers fall back to the buffer and the
/// backend, so eviction cannot lead to duplicate nodes.
pub struct LabelCache {
    inner: LruCache<String, NodeId>,
    hits: u64,
    misses: u64,
}

impl LabelCache {
    pub fn new(capacity: NonZeroUsize) -> Self {
        Self {
            inner: LruCache::new(capacity),
            hits: 0,
            misses: 0,
        }
    }

    pub fn get(&mut self, key: &str) -> Option<NodeId> {
        let found = self.inner.get(key).copied();
        if found.is_some() {
            self.hits += 1;
        } else {
            self.misses += 1;
        }
        found
    }

    pub fn put(&mut self, key: String, node: NodeId) {
        self.inner.put(key, node);
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }
}
