//! Value typing, null codes and node factorization policies.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::model::{labels, DatasetId, Edge, Node, NodeId, NodeKind};

static URI_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[A-Za-z][A-Za-z0-9+.\-]*://[^\s/?#]+[^\s]*$").unwrap());
static NUMBER_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[+-]?\d+(\.\d+)?$").unwrap());
static EMAIL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[^\s@]+@[^\s@.]+(\.[^\s@.]+)+$").unwrap());
static HASHTAG_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^#[\p{L}\p{N}_]+$").unwrap());
static ISO_DATE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2})(?:\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$",
    )
    .unwrap()
});
static FR_DATE_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{2})/(\d{2})/(\d{4})$").unwrap());

/// Recognizes the special value kinds; everything else is a plain value.
pub fn classify_value(label: &str) -> NodeKind {
    let s = label.trim();
    if s.is_empty() {
        NodeKind::ValueNode
    } else if URI_RE.is_match(s) {
        NodeKind::UriNode
    } else if EMAIL_RE.is_match(s) {
        NodeKind::EmailNode
    } else if HASHTAG_RE.is_match(s) {
        NodeKind::HashtagNode
    } else if date_timestamp(s).is_some() {
        NodeKind::DateNode
    } else if NUMBER_RE.is_match(s) {
        NodeKind::NumberNode
    } else {
        NodeKind::ValueNode
    }
}

/// Seconds since the epoch for ISO-8601 or DD/MM/YYYY dates.
pub fn date_timestamp(label: &str) -> Option<i64> {
    let s = label.trim();
    if let Some(c) = ISO_DATE_RE.captures(s) {
        let num = |i: usize| c.get(i).map(|m| m.as_str().parse::<u32>().unwrap_or(0));
        let date = NaiveDate::from_ymd_opt(num(1)? as i32, num(2)?, num(3)?)?;
        let time = NaiveTime::from_hms_opt(
            num(4).unwrap_or(0),
            num(5).unwrap_or(0),
            num(6).unwrap_or(0),
        )?;
        let naive = NaiveDateTime::new(date, time);
        let offset = match c.get(7).map(|m| m.as_str()) {
            None | Some("Z") => 0,
            Some(tz) => {
                let sign = if tz.starts_with('-') { -1 } else { 1 };
                let digits: String = tz[1..].chars().filter(|c| c.is_ascii_digit()).collect();
                let h: i64 = digits[..2].parse().ok()?;
                let m: i64 = digits[2..].parse().ok()?;
                sign * (h * 3600 + m * 60)
            }
        };
        return Some(naive.and_utc().timestamp() - offset);
    }
    if let Some(c) = FR_DATE_RE.captures(s) {
        let day: u32 = c[1].parse().ok()?;
        let month: u32 = c[2].parse().ok()?;
        let year: i32 = c[3].parse().ok()?;
        let date = NaiveDate::from_ymd_opt(year, month, day)?;
        return Some(date.and_time(NaiveTime::MIN).and_utc().timestamp());
    }
    None
}

/// Canonical decimal form: no sign for zero, no leading zeros, no trailing fractional zeros.
pub fn canonical_decimal(label: &str) -> Option<String> {
    let s = label.trim();
    if !NUMBER_RE.is_match(s) {
        return None;
    }
    let (negative, digits) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    let int = int.trim_start_matches('0');
    let frac = frac.trim_end_matches('0');
    let int = if int.is_empty() { "0" } else { int };
    let mut out = String::new();
    if negative && !(int == "0" && frac.is_empty()) {
        out.push('-');
    }
    out.push_str(int);
    if !frac.is_empty() {
        out.push('.');
        out.push_str(frac);
    }
    Some(out)
}

/// Strings treated as missing-value markers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullCodes(BTreeSet<String>);

impl NullCodes {
    pub const DEFAULTS: [&'static str; 8] = [
        "",
        "N/A",
        "NA",
        "null",
        "NULL",
        "-",
        "Unknown",
        "Données non publiées",
    ];

    pub fn none() -> Self {
        Self(BTreeSet::new())
    }

    pub fn defaults() -> Self {
        Self::from_iter(Self::DEFAULTS)
    }

    pub fn insert(&mut self, code: &str) {
        self.0.insert(code.trim().to_string());
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label.trim())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    /// One code per line; blank lines are ignored unless written as `""`.
    pub fn parse_list(text: &str) -> Self {
        let mut codes = Self::none();
        for line in text.lines() {
            let line = line.trim_end_matches('\r');
            if line.trim() == "\"\"" {
                codes.insert("");
            } else if !line.trim().is_empty() && !line.starts_with('#') {
                codes.insert(line);
            }
        }
        codes
    }
}

impl<'a> FromIterator<&'a str> for NullCodes {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        let mut codes = Self::none();
        for c in iter {
            codes.insert(c);
        }
        codes
    }
}

/// Whether equal labels may be fused into one node at all.
pub fn is_factorizable(label: &str, kind: NodeKind, nulls: &NullCodes) -> bool {
    if kind.is_entity() || nulls.contains(label) {
        return false;
    }
    let s = label.trim();
    if s.eq_ignore_ascii_case("true") || s.eq_ignore_ascii_case("false") {
        return false;
    }
    // small unsigned integers are usually ordinals
    !(!s.is_empty() && s.len() < 4 && s.bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorizationPolicy {
    PerInstance,
    PerPath,
    #[default]
    PerDataset,
    PerGraph,
}

impl FactorizationPolicy {
    pub const ALL: [FactorizationPolicy; 4] = [
        FactorizationPolicy::PerInstance,
        FactorizationPolicy::PerPath,
        FactorizationPolicy::PerDataset,
        FactorizationPolicy::PerGraph,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FactorizationPolicy::PerInstance => "per-instance",
            FactorizationPolicy::PerPath => "per-path",
            FactorizationPolicy::PerDataset => "per-dataset",
            FactorizationPolicy::PerGraph => "per-graph",
        }
    }
}

impl fmt::Display for FactorizationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FactorizationPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == norm || p.as_str().replace('-', "") == norm)
            .ok_or_else(|| format!("unknown factorization policy {s:?}"))
    }
}

/// Edge labels leading from the dataset node down to a value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelPath {
    pub dataset: DatasetId,
    pub labels: Vec<String>,
}

impl LabelPath {
    pub fn root(dataset: DatasetId) -> Self {
        Self {
            dataset,
            labels: Vec::new(),
        }
    }

    pub fn child(&self, label: &str) -> Self {
        let mut labels = self.labels.clone();
        labels.push(label.to_string());
        Self {
            dataset: self.dataset,
            labels,
        }
    }

    pub fn push(&mut self, label: &str) {
        self.labels.push(label.to_string());
    }

    pub fn pop(&mut self) {
        self.labels.pop();
    }
}

impl fmt::Display for LabelPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.labels.join("."))
    }
}

/// Nodes with equal keys are fused into one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FactorKey {
    Path {
        label: String,
        kind: NodeKind,
        path: LabelPath,
    },
    Dataset {
        label: String,
        kind: NodeKind,
        dataset: DatasetId,
    },
    Graph {
        label: String,
        kind: NodeKind,
    },
}

impl FactorKey {
    /// Flat string form used by the stores' key tables.
    pub fn encode(&self) -> String {
        const SEP: char = '\u{1f}';
        match self {
            FactorKey::Path { label, kind, path } => {
                let mut s = format!("p{SEP}{}{SEP}{}", kind.as_str(), path.dataset);
                for l in &path.labels {
                    s.push(SEP);
                    s.push_str(l);
                }
                s.push('\u{1e}');
                s.push_str(label);
                s
            }
            FactorKey::Dataset {
                label,
                kind,
                dataset,
            } => format!("d{SEP}{}{SEP}{dataset}{SEP}{label}", kind.as_str()),
            FactorKey::Graph { label, kind } => format!("g{SEP}{}{SEP}{label}", kind.as_str()),
        }
    }
}

/// Returns the fusion key for a value, or `None` when a fresh node is required.
pub fn factorization_key(
    policy: FactorizationPolicy,
    label: &str,
    kind: NodeKind,
    nulls: &NullCodes,
    path: &LabelPath,
) -> Option<FactorKey> {
    if !is_factorizable(label, kind, nulls) {
        return None;
    }
    let label = label.to_string();
    match policy {
        FactorizationPolicy::PerInstance => None,
        FactorizationPolicy::PerPath => Some(FactorKey::Path {
            label,
            kind,
            path: path.clone(),
        }),
        FactorizationPolicy::PerDataset => Some(FactorKey::Dataset {
            label,
            kind,
            dataset: path.dataset,
        }),
        FactorizationPolicy::PerGraph => Some(FactorKey::Graph { label, kind }),
    }
}

/// Top-k value labels by number of occurrences in the input (incoming structural edges).
pub fn frequent_values(nodes: &[Node], edges: &[Edge], k: usize) -> Vec<(String, u64)> {
    if k == 0 {
        return Vec::new();
    }
    let labels: HashMap<NodeId, &str> = nodes
        .iter()
        .filter(|n| n.kind.is_value())
        .map(|n| (n.id, n.label.as_str()))
        .collect();
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for e in edges {
        if e.label.starts_with(labels::RESERVED_PREFIX) {
            continue;
        }
        if let Some(label) = labels.get(&e.target) {
            *counts.entry(label).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(l, c)| (l.to_string(), c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_special_values() {
        assert_eq!(classify_value("http://a.org"), NodeKind::UriNode);
        assert_eq!(classify_value("#gilets"), NodeKind::HashtagNode);
        assert_eq!(classify_value("x@y.fr"), NodeKind::EmailNode);
        assert_eq!(classify_value("hello"), NodeKind::ValueNode);
        assert_eq!(classify_value("2020"), NodeKind::NumberNode);
        assert_eq!(classify_value("-12.50"), NodeKind::NumberNode);
        assert_eq!(classify_value("2019-03-01"), NodeKind::DateNode);
        assert_eq!(classify_value("2019-03-01T10:20:30Z"), NodeKind::DateNode);
        assert_eq!(classify_value("01/03/2019"), NodeKind::DateNode);
        assert_eq!(classify_value("31/02/2019"), NodeKind::ValueNode);
        assert_eq!(classify_value("a@b"), NodeKind::ValueNode);
        assert_eq!(classify_value("x@y@z.fr"), NodeKind::ValueNode);
        assert_eq!(classify_value("www.a.org"), NodeKind::ValueNode);
    }

    #[test]
    fn equivalent_dates_share_timestamps() {
        assert_eq!(date_timestamp("2019-03-01"), date_timestamp("01/03/2019"));
        assert_eq!(
            date_timestamp("2019-03-01T01:00:00+01:00"),
            date_timestamp("2019-03-01T00:00:00Z")
        );
    }

    #[test]
    fn canonical_decimals() {
        assert_eq!(canonical_decimal("1.0").as_deref(), Some("1"));
        assert_eq!(canonical_decimal("001").as_deref(), Some("1"));
        assert_eq!(canonical_decimal("-0.0").as_deref(), Some("0"));
        assert_eq!(canonical_decimal("+12.500").as_deref(), Some("12.5"));
        assert_eq!(canonical_decimal("abc"), None);
    }

    #[test]
    fn factorizability_rules() {
        let nulls = NullCodes::defaults();
        assert!(!is_factorizable("true", NodeKind::ValueNode, &nulls));
        assert!(!is_factorizable("FALSE", NodeKind::ValueNode, &nulls));
        assert!(!is_factorizable("123", NodeKind::NumberNode, &nulls));
        assert!(is_factorizable("2020", NodeKind::NumberNode, &nulls));
        assert!(is_factorizable("-12", NodeKind::NumberNode, &nulls));
        assert!(!is_factorizable(
            "Données non publiées",
            NodeKind::ValueNode,
            &nulls
        ));
        assert!(!is_factorizable(" N/A ", NodeKind::ValueNode, &nulls));
        assert!(is_factorizable(
            "Données non publiées",
            NodeKind::ValueNode,
            &NullCodes::none()
        ));
        assert!(!is_factorizable("Paris", NodeKind::EntityLocation, &nulls));
    }

    #[test]
    fn keys_follow_policy_scope() {
        let nulls = NullCodes::defaults();
        let ds = DatasetId(1);
        let city = LabelPath::root(ds)
            .child("employee")
            .child("address")
            .child("city");
        let hq = LabelPath::root(ds).child("headquartersCity");
        let key =
            |p, path: &LabelPath| factorization_key(p, "Paris", NodeKind::ValueNode, &nulls, path);

        assert_eq!(key(FactorizationPolicy::PerInstance, &city), None);
        assert_eq!(
            key(FactorizationPolicy::PerPath, &city),
            key(FactorizationPolicy::PerPath, &city)
        );
        assert_ne!(
            key(FactorizationPolicy::PerPath, &city),
            key(FactorizationPolicy::PerPath, &hq)
        );
        assert_eq!(
            key(FactorizationPolicy::PerDataset, &city),
            key(FactorizationPolicy::PerDataset, &hq)
        );
        let other = LabelPath::root(DatasetId(2)).child("headquartersCity");
        assert_ne!(
            key(FactorizationPolicy::PerDataset, &hq),
            key(FactorizationPolicy::PerDataset, &other)
        );
        assert_eq!(
            key(FactorizationPolicy::PerGraph, &hq),
            key(FactorizationPolicy::PerGraph, &other)
        );
        assert_eq!(
            factorization_key(
                FactorizationPolicy::PerGraph,
                "N/A",
                NodeKind::ValueNode,
                &nulls,
                &hq
            ),
            None
        );
    }

    #[test]
    fn encoded_keys_are_distinct_across_scopes() {
        let path = LabelPath::root(DatasetId(3)).child("a");
        let a = FactorKey::Path {
            label: "x".into(),
            kind: NodeKind::ValueNode,
            path,
        };
        let b = FactorKey::Dataset {
            label: "x".into(),
            kind: NodeKind::ValueNode,
            dataset: DatasetId(3),
        };
        let c = FactorKey::Graph {
            label: "x".into(),
            kind: NodeKind::ValueNode,
        };
        assert_ne!(a.encode(), b.encode());
        assert_ne!(b.encode(), c.encode());
    }

    #[test]
    fn policies_parse() {
        assert_eq!(
            "per-path".parse::<FactorizationPolicy>(),
            Ok(FactorizationPolicy::PerPath)
        );
        assert_eq!(
            "PerGraph".parse::<FactorizationPolicy>(),
            Ok(FactorizationPolicy::PerGraph)
        );
        assert!("sometimes".parse::<FactorizationPolicy>().is_err());
    }

    #[test]
    fn null_code_list_parsing() {
        let codes = NullCodes::parse_list("N/A\n# comment\n\n\"\"\n  Unknown  \n");
        assert!(codes.contains("N/A"));
        assert!(codes.contains(""));
        assert!(codes.contains("Unknown"));
        assert_eq!(codes.len(), 3);
    }
}
