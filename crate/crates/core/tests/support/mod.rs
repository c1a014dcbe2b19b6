#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use integraph::typing::NullCodes;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde_json::{json, Map, Value};

/// Serves `handler(path, body) -> (status, json)` on a local port until the
/// process exits. Returns the base URL.
pub fn mock_service<F>(handler: F) -> String
where
    F: Fn(&str, &[u8]) -> (u16, String) + Send + Sync + 'static,
{
    let server = tiny_http::Server::http("127.0.0.1:0").expect("bind mock service");
    let port = server.server_addr().to_ip().expect("tcp listener").port();
    let handler = Arc::new(handler);
    std::thread::spawn(move || {
        for mut request in server.incoming_requests() {
            let mut body = Vec::new();
            request.as_reader().read_to_end(&mut body).ok();
            let (status, reply) = handler(request.url(), &body);
            let header = tiny_http::Header::from_bytes("Content-Type", "application/json").unwrap();
            let response = tiny_http::Response::from_string(reply)
                .with_status_code(status)
                .with_header(header);
            request.respond(response).ok();
        }
    });
    format!("http://127.0.0.1:{port}")
}

/// A URL nothing listens on.
pub fn dead_endpoint() -> String {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port();
    drop(listener);
    format!("http://127.0.0.1:{port}/")
}

/// One leaf value and where the generator put it.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub dataset: usize,
    pub path: String,
    pub label: String,
}

/// Synthetic hierarchical corpus: a JSON document and an XML document, plus
/// every leaf they contain and their structural node and edge counts.
pub struct Corpus {
    pub json: String,
    pub xml: String,
    pub leaves: Vec<Leaf>,
    pub structural_nodes: usize,
    pub structural_edges: usize,
}

const CITIES: [&str; 12] = [
    "Paris",
    "Lyon",
    "Marseille",
    "Lille",
    "Nantes",
    "Rennes",
    "Toulouse",
    "Nice",
    "Brest",
    "Dijon",
    "Metz",
    "Tours",
];
const NAMES: [&str; 10] = [
    "Anne Martin",
    "Luc Bernard",
    "Marie Petit",
    "Paul Durand",
    "Julie Leroy",
    "Hugo Moreau",
    "Emma Simon",
    "Louis Laurent",
    "Chloé Michel",
    "Nina Garcia",
];
pub const NULL_CODE: &str = "Données non publiées";

fn pick<'a>(rng: &mut StdRng, items: &[&'a str]) -> &'a str {
    items[rng.random_range(0..items.len())]
}

/// About `target_leaves` leaves, split between the two documents. Labels are
/// city and person names shared across paths and documents, 4-digit years,
/// small ordinals, booleans and an injected null code.
pub fn generate_corpus(target_leaves: usize, seed: u64) -> Corpus {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut leaves = Vec::new();
    let mut structural_nodes = 0;
    let mut structural_edges = 0;

    // JSON: {"records": [ {name, city, year, rank, active, income, address: {city}} ]}
    let per_record = 7;
    let json_records = target_leaves / 2 / per_record;
    let mut records = Vec::new();
    structural_nodes += 2; // root map, array
    structural_edges += 1; // root -> array
    for _ in 0..json_records {
        let name = pick(&mut rng, &NAMES);
        let city = pick(&mut rng, &CITIES);
        let home = pick(&mut rng, &CITIES);
        let year = rng.random_range(2015..2024).to_string();
        let rank = rng.random_range(1..40).to_string();
        let active = if rng.random_bool(0.5) {
            "true"
        } else {
            "false"
        };
        let income = if rng.random_bool(0.3) {
            NULL_CODE.to_string()
        } else {
            (rng.random_range(10..60) * 1000).to_string()
        };
        let mut rec = Map::new();
        rec.insert("name".into(), json!(name));
        rec.insert("city".into(), json!(city));
        rec.insert("year".into(), json!(year));
        rec.insert("rank".into(), json!(rank));
        rec.insert("active".into(), json!(active));
        rec.insert("income".into(), json!(income));
        rec.insert("address".into(), json!({ "city": home }));
        records.push(Value::Object(rec));
        structural_nodes += 2; // record map, address map
        structural_edges += 2; // array -> record, record -> address
        for (path, label) in [
            ("records/*/name", name.to_string()),
            ("records/*/city", city.to_string()),
            ("records/*/year", year),
            ("records/*/rank", rank),
            ("records/*/active", active.to_string()),
            ("records/*/income", income),
            ("records/*/address/city", home.to_string()),
        ] {
            leaves.push(Leaf {
                dataset: 0,
                path: path.into(),
                label,
            });
            structural_edges += 1;
        }
    }
    let json = json!({ "records": records }).to_string();

    // XML: <people><person status=".."><name>..</name><town>..</town><since>..</since></person></people>
    let xml_records = (target_leaves - leaves.len()) / 4;
    let mut xml = String::from("<people>");
    structural_nodes += 1;
    for _ in 0..xml_records {
        let status = if rng.random_bool(0.2) {
            NULL_CODE
        } else {
            pick(&mut rng, &["active", "retired"])
        };
        let name = pick(&mut rng, &NAMES);
        let town = pick(&mut rng, &CITIES);
        let since = rng.random_range(1990..2024).to_string();
        xml.push_str(&format!(
            "<person status=\"{status}\"><name>{name}</name><town>{town}</town><since>{since}</since></person>"
        ));
        // person, attribute, name, town, since elements
        structural_nodes += 5;
        // people->person, person->attr, person->name/town/since
        structural_edges += 5;
        for (path, label) in [
            ("people/person/@status", status.to_string()),
            ("people/person/name", name.to_string()),
            ("people/person/town", town.to_string()),
            ("people/person/since", since),
        ] {
            leaves.push(Leaf {
                dataset: 1,
                path: path.into(),
                label,
            });
            structural_edges += 1;
        }
    }
    xml.push_str("</people>");
    // two anchors, one per document root
    structural_edges += 2;

    Corpus {
        json,
        xml,
        leaves,
        structural_nodes,
        structural_edges,
    }
}

/// Oracle for the number of leaf nodes under a policy, by direct application
/// of the fusion rules.
pub fn expected_leaf_nodes(leaves: &[Leaf], policy: &str, nulls: &NullCodes) -> usize {
    let fresh = |label: &str| {
        let s = label.trim();
        nulls.contains(s)
            || s.eq_ignore_ascii_case("true")
            || s.eq_ignore_ascii_case("false")
            || (s.len() < 4 && !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
    };
    let mut keys = HashSet::new();
    let mut count = 0;
    for leaf in leaves {
        if policy == "per-instance" || fresh(&leaf.label) {
            count += 1;
            continue;
        }
        let key = match policy {
            "per-path" => format!("{}|{}|{}", leaf.dataset, leaf.path, leaf.label),
            "per-dataset" => format!("{}|{}", leaf.dataset, leaf.label),
            "per-graph" => leaf.label.clone(),
            other => panic!("unknown policy {other}"),
        };
        if keys.insert(key) {
            count += 1;
        }
    }
    count
}

/// Deterministic random strings over a small alphabet with accents and spaces.
pub fn random_string(rng: &mut StdRng, max_len: usize) -> String {
    const ALPHABET: [char; 12] = ['a', 'b', 'c', 'é', 'E', ' ', 'x', 'y', 'z', 'ü', '.', 'B'];
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())])
        .collect()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
