use serde_json::Value;

use super::{Emitter, IngestReport};
use crate::error::IngestError;
use crate::graph::Graph;
use crate::model::{DatasetId, NodeId, NodeKind};
use crate::typing::LabelPath;

/// Parses and maps a JSON document. A parse failure rejects the whole dataset.
pub fn ingest_json(
    graph: &mut Graph,
    document: &str,
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let value: Value =
        serde_json::from_str(document).map_err(|e| IngestError::Parse(e.to_string()))?;
    ingest_json_value(graph, &value, ds)
}

/// Maps an already parsed document. Objects become map nodes whose keys label
/// the outgoing edges; array members hang off ε edges. `null` members produce
/// neither node nor edge.
pub fn ingest_json_value(
    graph: &mut Graph,
    value: &Value,
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let mut em = Emitter::new(graph, ds)?;
    let mut path = LabelPath::root(ds);
    if let Some(root) = map_value(&mut em, value, &mut path)? {
        em.anchor(root)?;
    }
    Ok(em.finish())
}

fn map_value(
    em: &mut Emitter<'_>,
    value: &Value,
    path: &mut LabelPath,
) -> Result<Option<NodeId>, IngestError> {
    let id = match value {
        Value::Null => return Ok(None),
        Value::Bool(b) => em.value(if *b { "true" } else { "false" }, path)?,
        Value::Number(n) => em.value(&n.to_string(), path)?,
        Value::String(s) => em.value(s, path)?,
        Value::Array(items) => {
            let node = em.fresh("", NodeKind::ArrayNode)?;
            path.push("");
            for item in items {
                if let Some(child) = map_value(em, item, path)? {
                    em.edge(node, child, "")?;
                }
            }
            path.pop();
            node
        }
        Value::Object(fields) => {
            let node = em.fresh("", NodeKind::MapNode)?;
            for (key, item) in fields {
                path.push(key);
                let child = map_value(em, item, path)?;
                path.pop();
                if let Some(child) = child {
                    em.edge(node, child, key)?;
                }
            }
            node
        }
    };
    Ok(Some(id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DataModel;
    use crate::typing::FactorizationPolicy;

    fn run(doc: &str, policy: FactorizationPolicy) -> (IngestReport, Graph) {
        let mut g = Graph::in_memory().with_policy(policy);
        let ds = g.register_dataset(DataModel::Json, None).unwrap();
        let r = ingest_json(&mut g, doc, ds).unwrap();
        (r, g)
    }

    #[test]
    fn flat_object() {
        let (r, mut g) = run(r#"{"a":1,"b":"x"}"#, FactorizationPolicy::PerDataset);
        assert_eq!((r.nodes, r.edges), (3, 2));
        let labels: Vec<String> = g
            .edges()
            .unwrap()
            .into_iter()
            .filter(|e| !e.label.is_empty())
            .map(|e| e.label)
            .collect();
        assert_eq!(labels, vec!["a", "b"]);
    }

    #[test]
    fn empty_array() {
        let (r, _) = run("[]", FactorizationPolicy::PerDataset);
        assert_eq!((r.nodes, r.edges), (1, 0));
    }

    #[test]
    fn repeated_member_values() {
        let doc = r#"{"a":["Paris","Paris"]}"#;
        assert_eq!(run(doc, FactorizationPolicy::PerInstance).0.nodes, 4);
        assert_eq!(run(doc, FactorizationPolicy::PerPath).0.nodes, 3);
        // small integers never fuse
        assert_eq!(
            run(r#"{"a":[1,1]}"#, FactorizationPolicy::PerPath).0.nodes,
            4
        );
    }

    #[test]
    fn nulls_are_dropped() {
        let (r, _) = run(r#"{"a":null,"b":[null]}"#, FactorizationPolicy::PerDataset);
        assert_eq!((r.nodes, r.edges), (2, 1));
    }

    #[test]
    fn parse_failure_rejects() {
        let mut g = Graph::in_memory();
        let ds = g.register_dataset(DataModel::Json, None).unwrap();
        assert!(matches!(
            ingest_json(&mut g, "{", ds),
            Err(IngestError::Parse(_))
        ));
    }
}
