use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::similarity::{jaccard_words, jaro, levenshtein_sim, word_tokens};
use crate::model::{Node, NodeId, NodeKind};
use crate::typing::{canonical_decimal, date_timestamp, NullCodes};

pub const SHORT_STRING_MAX_LEN: usize = 128;
pub const LONG_STRING_MIN_LEN: usize = 32;
const PREFIX_LEN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimilarityFn {
    Jaro,
    Levenshtein,
    Jaccard,
    Equality,
}

/// Node group a rule compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Person,
    Location,
    Organization,
    /// URI, hashtag and email nodes with the same label.
    Identifier,
    Number,
    Date,
    ShortString,
    LongString,
}

impl RuleKind {
    pub fn is_entity(self) -> bool {
        matches!(
            self,
            RuleKind::Person | RuleKind::Location | RuleKind::Organization
        )
    }

    pub fn is_string(self) -> bool {
        matches!(self, RuleKind::ShortString | RuleKind::LongString)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRule {
    pub kind: RuleKind,
    pub similarity: SimilarityFn,
    pub threshold: f64,
}

/// Kinds treated as plain (non-entity) strings by the string rules.
fn is_plain_string(kind: NodeKind) -> bool {
    matches!(
        kind,
        NodeKind::ValueNode | NodeKind::TextSegmentNode | NodeKind::HeaderCellNode
    )
}

fn prefix(s: &str) -> &str {
    match s.char_indices().nth(PREFIX_LEN) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

/// `|a - b| <= 20% of the longer length`.
fn within_relative_length(a: usize, b: usize) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    5 * (hi - lo) <= hi
}

impl MatchRule {
    pub const fn new(kind: RuleKind, similarity: SimilarityFn, threshold: f64) -> Self {
        Self {
            kind,
            similarity,
            threshold,
        }
    }

    /// The eight shipped rules, one per node group.
    pub fn default_rules() -> Vec<MatchRule> {
        vec![
            MatchRule::new(RuleKind::Person, SimilarityFn::Jaro, 0.8),
            MatchRule::new(RuleKind::Location, SimilarityFn::Jaro, 0.8),
            MatchRule::new(RuleKind::Organization, SimilarityFn::Jaro, 0.95),
            MatchRule::new(RuleKind::Identifier, SimilarityFn::Equality, 1.0),
            MatchRule::new(RuleKind::Number, SimilarityFn::Equality, 1.0),
            MatchRule::new(RuleKind::Date, SimilarityFn::Equality, 1.0),
            MatchRule::new(RuleKind::ShortString, SimilarityFn::Levenshtein, 0.8),
            MatchRule::new(RuleKind::LongString, SimilarityFn::Jaccard, 0.8),
        ]
    }

    /// The shipped rules without the two plain-string comparisons.
    pub fn entity_only_rules() -> Vec<MatchRule> {
        Self::default_rules()
            .into_iter()
            .filter(|r| !r.kind.is_string())
            .collect()
    }

    /// Group selector over a single node.
    pub fn selects(&self, node: &Node, nulls: &NullCodes) -> bool {
        if node.normalized_label.is_empty() || nulls.contains(&node.label) {
            return false;
        }
        let len = node.normalized_label.chars().count();
        match self.kind {
            RuleKind::Person => node.kind == NodeKind::EntityPerson,
            RuleKind::Location => node.kind == NodeKind::EntityLocation,
            RuleKind::Organization => node.kind == NodeKind::EntityOrganization,
            RuleKind::Identifier => matches!(
                node.kind,
                NodeKind::UriNode | NodeKind::HashtagNode | NodeKind::EmailNode
            ),
            RuleKind::Number => node.kind == NodeKind::NumberNode,
            RuleKind::Date => node.kind == NodeKind::DateNode,
            RuleKind::ShortString => is_plain_string(node.kind) && len < SHORT_STRING_MAX_LEN,
            RuleKind::LongString => is_plain_string(node.kind) && len > LONG_STRING_MIN_LEN,
        }
    }

    /// Pair filter, applied to two selected nodes.
    pub fn accepts_pair(&self, a: &Node, b: &Node) -> bool {
        if a.id == b.id {
            return false;
        }
        match self.kind {
            RuleKind::Person | RuleKind::Location | RuleKind::Organization => true,
            RuleKind::Identifier => a.kind == b.kind && a.label == b.label,
            RuleKind::Number => {
                canonical_decimal(&a.label).is_some()
                    && canonical_decimal(&a.label) == canonical_decimal(&b.label)
            }
            RuleKind::Date => {
                date_timestamp(&a.label).is_some()
                    && date_timestamp(&a.label) == date_timestamp(&b.label)
            }
            RuleKind::ShortString => {
                within_relative_length(
                    a.normalized_label.chars().count(),
                    b.normalized_label.chars().count(),
                ) && prefix(&a.normalized_label) == prefix(&b.normalized_label)
            }
            RuleKind::LongString => {
                within_relative_length(
                    a.normalized_label.chars().count(),
                    b.normalized_label.chars().count(),
                ) && {
                    let words: BTreeSet<String> = word_tokens(&a.normalized_label).collect();
                    word_tokens(&b.normalized_label).any(|w| words.contains(&w))
                }
            }
        }
    }

    /// Similarity of two nodes under this rule's function.
    pub fn compare(&self, a: &Node, b: &Node) -> f64 {
        match self.similarity {
            SimilarityFn::Jaro => jaro(&a.normalized_label, &b.normalized_label),
            SimilarityFn::Levenshtein => levenshtein_sim(&a.normalized_label, &b.normalized_label),
            SimilarityFn::Jaccard => jaccard_words(&a.normalized_label, &b.normalized_label),
            SimilarityFn::Equality => {
                if self.accepts_pair(a, b) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

fn ordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn all_pairs(ids: &[NodeId], out: &mut Vec<(NodeId, NodeId)>) {
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            out.push(ordered(a, b));
        }
    }
}

fn grouped<K: std::hash::Hash + Eq>(
    selected: &[&Node],
    key: impl Fn(&Node) -> Option<K>,
) -> Vec<(NodeId, NodeId)> {
    let mut groups: HashMap<K, Vec<NodeId>> = HashMap::new();
    for n in selected {
        if let Some(k) = key(n) {
            groups.entry(k).or_default().push(n.id);
        }
    }
    let mut out = Vec::new();
    for ids in groups.values() {
        all_pairs(ids, &mut out);
    }
    out
}

/// Node pairs satisfying `rule`'s selectors, each unordered pair once, sorted.
///
/// Blocking indexes (exact label, length window within a prefix bucket, shared
/// word) narrow the comparison set; the result equals filtering all pairs.
pub fn candidate_pairs(
    nodes: &[Node],
    rule: &MatchRule,
    nulls: &NullCodes,
) -> Vec<(NodeId, NodeId)> {
    let selected: Vec<&Node> = nodes.iter().filter(|n| rule.selects(n, nulls)).collect();
    let mut pairs = match rule.kind {
        RuleKind::Person | RuleKind::Location | RuleKind::Organization => {
            let ids: Vec<NodeId> = selected.iter().map(|n| n.id).collect();
            let mut out = Vec::new();
            all_pairs(&ids, &mut out);
            out
        }
        RuleKind::Identifier => grouped(&selected, |n| Some((n.kind, n.label.clone()))),
        RuleKind::Number => grouped(&selected, |n| canonical_decimal(&n.label)),
        RuleKind::Date => grouped(&selected, |n| date_timestamp(&n.label)),
        RuleKind::ShortString => {
            let mut buckets: HashMap<&str, Vec<(usize, NodeId)>> = HashMap::new();
            for n in &selected {
                buckets
                    .entry(prefix(&n.normalized_label))
                    .or_default()
                    .push((n.normalized_label.chars().count(), n.id));
            }
            let mut out = Vec::new();
            for bucket in buckets.values_mut() {
                bucket.sort();
                for (i, &(len_a, a)) in bucket.iter().enumerate() {
                    for &(len_b, b) in &bucket[i + 1..] {
                        if !within_relative_length(len_a, len_b) {
                            break;
                        }
                        if a != b {
                            out.push(ordered(a, b));
                        }
                    }
                }
            }
            out
        }
        RuleKind::LongString => {
            let lens: Vec<usize> = selected
                .iter()
                .map(|n| n.normalized_label.chars().count())
                .collect();
            let mut postings: HashMap<String, Vec<usize>> = HashMap::new();
            for (i, n) in selected.iter().enumerate() {
                let words: BTreeSet<String> = word_tokens(&n.normalized_label).collect();
                for w in words {
                    postings.entry(w).or_default().push(i);
                }
            }
            let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
            for list in postings.values() {
                for (x, &i) in list.iter().enumerate() {
                    for &j in &list[x + 1..] {
                        if within_relative_length(lens[i], lens[j]) {
                            seen.insert((i, j));
                        }
                    }
                }
            }
            seen.into_iter()
                .map(|(i, j)| ordered(selected[i].id, selected[j].id))
                .collect()
        }
    };
    pairs.sort();
    pairs.dedup();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DatasetId;

    fn node(id: u64, label: &str, kind: NodeKind) -> Node {
        Node::new(NodeId(id), label, kind, DatasetId(0))
    }

    #[test]
    fn short_strings_respect_relative_length() {
        let a = node(1, &format!("abc{}", "x".repeat(97)), NodeKind::ValueNode);
        let b = node(2, &format!("abc{}", "x".repeat(127)), NodeKind::ValueNode);
        let rule = MatchRule::new(RuleKind::ShortString, SimilarityFn::Levenshtein, 0.8);
        assert_eq!(a.label.len(), 100);
        assert!(!rule.selects(&b, &NullCodes::none()));
        assert!(!within_relative_length(100, 130));
        let c = node(3, &format!("abc{}", "x".repeat(123)), NodeKind::ValueNode);
        assert!(rule.selects(&c, &NullCodes::none()));
        assert!(!rule.accepts_pair(&a, &c));
        assert!(candidate_pairs(&[a, c], &rule, &NullCodes::none()).is_empty());
    }

    #[test]
    fn location_rule_pairs_all_locations() {
        let nodes = [
            node(1, "Centrafrique", NodeKind::EntityLocation),
            node(2, "Central African Republic", NodeKind::EntityLocation),
            node(3, "Areva", NodeKind::EntityOrganization),
        ];
        let rule = MatchRule::new(RuleKind::Location, SimilarityFn::Jaro, 0.8);
        assert_eq!(
            candidate_pairs(&nodes, &rule, &NullCodes::none()),
            vec![(NodeId(1), NodeId(2))]
        );
    }

    #[test]
    fn numbers_compare_canonical_values() {
        let nodes = [
            node(1, "1.0", NodeKind::NumberNode),
            node(2, "1", NodeKind::NumberNode),
            node(3, "1.5", NodeKind::NumberNode),
        ];
        let rule = MatchRule::new(RuleKind::Number, SimilarityFn::Equality, 1.0);
        assert_eq!(
            candidate_pairs(&nodes, &rule, &NullCodes::none()),
            vec![(NodeId(1), NodeId(2))]
        );
    }

    #[test]
    fn null_codes_are_never_paired() {
        let nodes = [
            node(1, "N/A", NodeKind::ValueNode),
            node(2, "N/A", NodeKind::ValueNode),
        ];
        let rule = MatchRule::new(RuleKind::ShortString, SimilarityFn::Levenshtein, 0.8);
        assert!(candidate_pairs(&nodes, &rule, &NullCodes::defaults()).is_empty());
        assert_eq!(candidate_pairs(&nodes, &rule, &NullCodes::none()).len(), 1);
    }

    #[test]
    fn short_prefixes_use_full_length() {
        assert_eq!(prefix("ab"), "ab");
        assert_eq!(prefix("éléphant"), "élé");
    }
}
