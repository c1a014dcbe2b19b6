//! Browser bindings. Every exported function takes plain strings and returns
//! a JSON string, so the page needs no generated type glue.

use integraph::matching::{
    jaccard_words, jaro, levenshtein_sim, match_graph, MatchRule, MatchingMode,
};
use integraph::pipeline::{BuildConfig, Builder};
use integraph::{connect, sample, DataModel, DatasetInput, FactorizationPolicy, Graph, NodeKind};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn kind_named(name: &str) -> Result<NodeKind, String> {
    Ok(match name {
        "value" => NodeKind::ValueNode,
        "person" => NodeKind::EntityPerson,
        "location" => NodeKind::EntityLocation,
        "organization" => NodeKind::EntityOrganization,
        "number" => NodeKind::NumberNode,
        "date" => NodeKind::DateNode,
        "uri" => NodeKind::UriNode,
        other => return Err(format!("unknown kind {other:?}")),
    })
}

fn model_named(name: &str) -> Result<DataModel, String> {
    Ok(match name {
        "json" => DataModel::Json,
        "xml" => DataModel::Xml,
        "html" => DataModel::Html,
        "csv" => DataModel::Relational,
        "rdf" => DataModel::Rdf,
        "text" => DataModel::Text,
        other => return Err(format!("unknown data model {other:?}")),
    })
}

fn error(message: impl std::fmt::Display) -> Value {
    json!({ "error": message.to_string() })
}

/// Raw kernel values plus what the shipped rules decide for two labels of `kind`.
pub fn compare(a: &str, b: &str, kind: &str) -> Value {
    let kind = match kind_named(kind) {
        Ok(k) => k,
        Err(e) => return error(e),
    };
    let mut g = Graph::in_memory();
    let outcome = g
        .register_dataset(DataModel::Json, None)
        .and_then(|ds| Ok((g.add_node(a, kind, ds)?, g.add_node(b, kind, ds)?)))
        .and_then(|(x, y)| {
            let m = match_graph(&mut g, &MatchRule::default_rules())?;
            Ok((x, y, m))
        });
    let (x, y, m) = match outcome {
        Ok(v) => v,
        Err(e) => return error(e),
    };
    let decision = if g.equivalence_mut().same_class(x, y) {
        json!({ "outcome": "equivalent", "similarity": 1.0 })
    } else if let Some(s) = m.similar.first() {
        json!({ "outcome": "similar", "similarity": s.similarity })
    } else {
        json!({ "outcome": "unrelated" })
    };
    json!({
        "jaro": jaro(a, b),
        "levenshtein": levenshtein_sim(a, b),
        "jaccard": jaccard_words(a, b),
        "decision": decision,
    })
}

/// Node and edge counts of one document under each factorization policy.
pub fn factorization(document: &str, model: &str) -> Value {
    let model = match model_named(model) {
        Ok(m) => m,
        Err(e) => return error(e),
    };
    let mut rows = Vec::new();
    for policy in FactorizationPolicy::ALL {
        let config = BuildConfig {
            policy,
            matching: MatchingMode::Off,
            ..Default::default()
        };
        let report = Builder::in_memory(config)
            .and_then(|mut b| b.build(&[DatasetInput::new(model, "document", document)]));
        match report {
            Ok(r) if r.failures.is_empty() => rows.push(json!({
                "policy": policy.as_str(),
                "nodes": r.nodes,
                "edges": r.edges,
            })),
            Ok(r) => return error(&r.failures[0].error),
            Err(e) => return error(e),
        }
    }
    Value::Array(rows)
}

/// Builds the bundled sample corpus and searches a path between two labels.
pub fn connect_sample(from: &str, to: &str, max_hops: usize) -> Value {
    let config = BuildConfig {
        policy: FactorizationPolicy::PerGraph,
        ..Default::default()
    };
    let mut builder = match Builder::in_memory(config) {
        Ok(b) => b.with_extractor(Box::new(sample::gazetteer())),
        Err(e) => return error(e),
    };
    let report = match builder.build(&sample::inputs()) {
        Ok(r) => r,
        Err(e) => return error(e),
    };
    match connect(builder.graph_mut(), from, to, max_hops) {
        Ok(c) => {
            let text = match &c {
                integraph::Connection::Path(p) => p.to_string(),
                _ => String::new(),
            };
            json!({
                "connection": c,
                "text": text,
                "graph": { "nodes": report.nodes, "edges": report.edges, "similar": report.similar },
            })
        }
        Err(e) => error(e),
    }
}

/// The sample datasets, for display next to the connect demo.
pub fn sample_datasets() -> Value {
    json!([
        { "name": "deputes.json", "body": sample::DEPUTIES_JSON },
        { "name": "hatvp.csv", "body": sample::ASSETS_CSV },
        { "name": "article.txt", "body": sample::ARTICLE_TEXT },
        { "name": "kb.nt", "body": sample::KB_NTRIPLES },
    ])
}

#[wasm_bindgen(js_name = compareLabels)]
pub fn compare_labels_js(a: &str, b: &str, kind: &str) -> String {
    compare(a, b, kind).to_string()
}

#[wasm_bindgen(js_name = factorizationCounts)]
pub fn factorization_js(document: &str, model: &str) -> String {
    factorization(document, model).to_string()
}

#[wasm_bindgen(js_name = connectSample)]
pub fn connect_sample_js(from: &str, to: &str, max_hops: usize) -> String {
    connect_sample(from, to, max_hops).to_string()
}

#[wasm_bindgen(js_name = sampleDatasets)]
pub fn sample_datasets_js() -> String {
    sample_datasets().to_string()
}
