use integraph::ingest::{ingest_json_value, parse_ntriples_line, Segmenter, Term};
use integraph::matching::{jaccard_words, jaro, levenshtein_sim};
use integraph::model::{escape_user_label, labels, DataModel};
use integraph::storage::{export_graph, import_graph};
use integraph::{FactorizationPolicy, Graph, GraphStore};
use proptest::prelude::*;
use serde_json::Value;

fn json_value() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        (0i64..3000).prop_map(Value::from),
        prop::sample::select(vec![
            "Paris",
            "Lyon",
            "Données non publiées",
            "2020-01-15",
            "x"
        ])
        .prop_map(|s| Value::String(s.to_string())),
    ];
    leaf.prop_recursive(4, 48, 5, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..5).prop_map(Value::Array),
            prop::collection::btree_map(
                prop::sample::select(vec!["a", "b", "ville", "cl:x"]),
                inner,
                0..4
            )
            .prop_map(|m| Value::Object(m.into_iter().map(|(k, v)| (k.to_string(), v)).collect())),
        ]
    })
}

fn escape_literal(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn ingest(value: &Value, policy: FactorizationPolicy) -> Graph {
    let mut g = Graph::in_memory().with_policy(policy);
    let ds = g.register_dataset(DataModel::Json, None).unwrap();
    ingest_json_value(&mut g, value, ds).unwrap();
    g
}

proptest! {
    #[test]
    fn kernels_are_symmetric_bounded_and_reflexive(a in "\\PC{0,24}", b in "\\PC{0,24}") {
        for f in [jaro, levenshtein_sim, jaccard_words] {
            let ab = f(&a, &b);
            prop_assert_eq!(ab, f(&b, &a));
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(f(&a, &a), 1.0);
        }
    }

    #[test]
    fn literals_survive_escaping(s in "\\PC{0,40}|[\"\\\\\n\t ]{0,8}") {
        let line = format!("<http://s> <http://p> \"{}\" .", escape_literal(&s));
        let triple = parse_ntriples_line(&line).unwrap().unwrap();
        prop_assert_eq!(triple.object, Term::Literal { value: s, datatype: None, lang: None });
    }

    #[test]
    fn user_labels_never_enter_the_reserved_namespace(s in "(cl:)?[a-z:%0-9]{0,10}") {
        prop_assert!(!escape_user_label(&s).starts_with(labels::RESERVED_PREFIX));
    }

    #[test]
    fn segmentation_keeps_every_character(words in prop::collection::vec("[A-Za-zé]{1,6}[.!?]?", 0..30)) {
        let text = words.join(" ");
        let squeeze = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        let joined: String = Segmenter::default().split(&text).iter().map(|s| squeeze(s)).collect();
        prop_assert_eq!(joined, squeeze(&text));
    }

    #[test]
    fn policies_share_edges_and_order_nodes(value in json_value()) {
        let counts: Vec<_> = FactorizationPolicy::ALL
            .iter()
            .map(|p| ingest(&value, *p).counts().unwrap())
            .collect();
        for c in &counts {
            prop_assert_eq!(c.edges, counts[0].edges);
        }
        // ALL runs from per-instance down to per-graph
        for w in counts.windows(2) {
            prop_assert!(w[0].nodes >= w[1].nodes, "{:?}", counts);
        }
    }

    #[test]
    fn export_then_import_is_lossless(value in json_value()) {
        let mut g = ingest(&value, FactorizationPolicy::PerGraph);
        g.flush().unwrap();
        let store = g.into_store().unwrap();
        let mut bytes = Vec::new();
        export_graph(&store, &mut bytes).unwrap();
        let copy = import_graph(bytes.as_slice(), GraphStore::in_memory()).unwrap();
        prop_assert_eq!(copy.scan_nodes().unwrap(), store.scan_nodes().unwrap());
        prop_assert_eq!(copy.scan_edges().unwrap(), store.scan_edges().unwrap());
        prop_assert_eq!(copy.scan_datasets().unwrap(), store.scan_datasets().unwrap());
        let mut again = Vec::new();
        export_graph(&copy, &mut again).unwrap();
        prop_assert_eq!(again, bytes);
    }
}
