//! Set-at-a-time node matching: similarity edges and equivalence classes.

mod equivalence;
mod rules;
mod similarity;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

pub use equivalence::EquivalenceStore;
pub use rules::{
    candidate_pairs, MatchRule, RuleKind, SimilarityFn, LONG_STRING_MIN_LEN, SHORT_STRING_MAX_LEN,
};
pub use similarity::{
    edit_distance, jaccard_words, jaro, levenshtein_sim, normalize_person, word_tokens,
};

use crate::error::GraphError;
use crate::graph::Graph;
use crate::model::{Node, NodeId, Similar};
use crate::typing::NullCodes;

/// Which rule set a build runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingMode {
    Off,
    /// Skip the short- and long-string comparisons.
    #[serde(alias = "entity")]
    EntityOnly,
    #[default]
    Full,
}

impl MatchingMode {
    pub fn rules(self) -> Vec<MatchRule> {
        match self {
            MatchingMode::Off => Vec::new(),
            MatchingMode::EntityOnly => MatchRule::entity_only_rules(),
            MatchingMode::Full => MatchRule::default_rules(),
        }
    }
}

impl std::str::FromStr for MatchingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" | "none" => Ok(MatchingMode::Off),
            "entity" | "entity-only" => Ok(MatchingMode::EntityOnly),
            "full" => Ok(MatchingMode::Full),
            other => Err(format!("unknown matching mode {other:?}")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchOutcome {
    /// Records with threshold <= similarity < 1.
    pub similar: Vec<Similar>,
    /// Pairs found identical (similarity 1.0) and merged.
    pub unions: usize,
    pub compared: usize,
}

/// Compares every candidate pair of every rule.
///
/// Identical pairs are merged in `equivalence`; pairs at or above the rule
/// threshold become similarity records. When several rules compare the same
/// pair, the highest similarity wins.
pub fn match_nodes(
    nodes: &[Node],
    rules: &[MatchRule],
    nulls: &NullCodes,
    equivalence: &mut EquivalenceStore,
) -> MatchOutcome {
    let by_id: HashMap<NodeId, &Node> = nodes.iter().map(|n| (n.id, n)).collect();
    let mut best: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    let mut compared = 0;
    for rule in rules {
        for (a, b) in candidate_pairs(nodes, rule, nulls) {
            compared += 1;
            let s = rule.compare(by_id[&a], by_id[&b]);
            if s >= rule.threshold {
                let slot = best.entry((a, b)).or_insert(s);
                if s > *slot {
                    *slot = s;
                }
            }
        }
    }
    let mut outcome = MatchOutcome {
        compared,
        ..Default::default()
    };
    for ((a, b), s) in best {
        if s >= 1.0 {
            equivalence.union(a, b);
            outcome.unions += 1;
        } else {
            outcome.similar.push(Similar::new(a, b, s));
        }
    }
    outcome
}

/// Matches all stored nodes of `graph`, stores the similarity records and
/// persists the updated representatives.
pub fn match_graph(graph: &mut Graph, rules: &[MatchRule]) -> Result<MatchOutcome, GraphError> {
    let nodes = graph.nodes()?;
    let nulls = graph.null_codes().clone();
    let outcome = match_nodes(&nodes, rules, &nulls, graph.equivalence_mut());
    for s in &outcome.similar {
        graph.store_mut().put_similar(*s)?;
    }
    graph.persist_representatives()?;
    graph.flush()?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DatasetId, NodeKind};

    fn node(id: u64, label: &str, kind: NodeKind) -> Node {
        Node::new(NodeId(id), label, kind, DatasetId(0))
    }

    #[test]
    fn organization_threshold_is_strict() {
        // jaro("areva", "areva sa") = 0.875, below 0.95
        let nodes = [
            node(1, "Areva", NodeKind::EntityOrganization),
            node(2, "Areva SA", NodeKind::EntityOrganization),
        ];
        let mut eq = EquivalenceStore::new();
        let out = match_nodes(
            &nodes,
            &MatchRule::default_rules(),
            &NullCodes::none(),
            &mut eq,
        );
        assert!(out.similar.is_empty());
        assert_eq!(out.unions, 0);
    }

    #[test]
    fn person_pairs_above_threshold_become_records() {
        let nodes = [
            node(1, "P. Balkany", NodeKind::EntityPerson),
            node(2, "I. Balkany", NodeKind::EntityPerson),
        ];
        let mut eq = EquivalenceStore::new();
        let out = match_nodes(
            &nodes,
            &MatchRule::default_rules(),
            &NullCodes::none(),
            &mut eq,
        );
        assert_eq!(out.similar.len(), 1);
        assert_eq!(out.similar[0].similarity, jaro("p. balkany", "i. balkany"));
    }

    #[test]
    fn identical_uris_are_merged_without_records() {
        let nodes: Vec<Node> = (1..=5)
            .map(|i| node(i, "http://a.org", NodeKind::UriNode))
            .collect();
        let mut eq = EquivalenceStore::new();
        let out = match_nodes(
            &nodes,
            &MatchRule::default_rules(),
            &NullCodes::none(),
            &mut eq,
        );
        assert!(out.similar.is_empty());
        assert_eq!(eq.len(), 5);
        assert!((1..=5).all(|i| eq.find(NodeId(i)) == NodeId(1)));
    }

    #[test]
    fn matching_modes_parse() {
        assert_eq!(
            "entity".parse::<MatchingMode>(),
            Ok(MatchingMode::EntityOnly)
        );
        assert_eq!(MatchingMode::EntityOnly.rules().len(), 6);
        assert!(MatchingMode::Off.rules().is_empty());
    }
}
