//! Build orchestration: ingest, extract, disambiguate, match, persist.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use web_time::Instant;

use crate::error::{GraphError, IngestError};
use crate::extract::{extract_graph, Extractor, Gazetteer};
use crate::graph::Graph;
use crate::ingest::{
    ingest_2dtable, ingest_csv, ingest_html, ingest_json, ingest_pdf, ingest_rdf, ingest_text,
    ingest_xml, Grid2d, IngestReport, PdfService, Segmenter,
};
use crate::matching::{match_graph, MatchingMode};
use crate::model::DataModel;
use crate::ned::{link_entity, Disambiguator, Mention, NedClient};
use crate::storage::{GraphStore, DEFAULT_BUFFER_SIZE, DEFAULT_CACHE_SIZE};
use crate::typing::{FactorizationPolicy, NullCodes};

pub const LAST_REPORT_META: &str = "last_report";

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Where entity occurrences come from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ExtractorSpec {
    #[default]
    Off,
    Gazetteer(String),
    Remote(String),
}

/// Which disambiguation service, if any, is used.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ServiceSpec {
    #[default]
    Off,
    Remote(String),
}

fn is_http(s: &str) -> bool {
    s.starts_with("http://") || s.starts_with("https://")
}

impl FromStr for ExtractorSpec {
    type Err = String;

    /// `off`, `gazetteer:<path>` or an http(s) URL.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "off" {
            Ok(ExtractorSpec::Off)
        } else if let Some(path) = s.strip_prefix("gazetteer:") {
            Ok(ExtractorSpec::Gazetteer(path.to_string()))
        } else if is_http(s) {
            Ok(ExtractorSpec::Remote(s.to_string()))
        } else {
            Err(format!(
                "extractor must be off, gazetteer:<path> or a URL, got {s:?}"
            ))
        }
    }
}

impl fmt::Display for ExtractorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractorSpec::Off => f.write_str("off"),
            ExtractorSpec::Gazetteer(p) => write!(f, "gazetteer:{p}"),
            ExtractorSpec::Remote(u) => f.write_str(u),
        }
    }
}

impl FromStr for ServiceSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "off" {
            Ok(ServiceSpec::Off)
        } else if is_http(s) {
            Ok(ServiceSpec::Remote(s.to_string()))
        } else {
            Err(format!("service must be off or a URL, got {s:?}"))
        }
    }
}

impl fmt::Display for ServiceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ServiceSpec::Off => f.write_str("off"),
            ServiceSpec::Remote(u) => f.write_str(u),
        }
    }
}

macro_rules! string_conversions {
    ($t:ty) => {
        impl TryFrom<String> for $t {
            type Error = String;
            fn try_from(s: String) -> Result<Self, String> {
                s.parse()
            }
        }
        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.to_string()
            }
        }
    };
}
string_conversions!(ExtractorSpec);
string_conversions!(ServiceSpec);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct BuildConfig {
    pub policy: FactorizationPolicy,
    pub null_codes: NullCodes,
    pub extractor: ExtractorSpec,
    pub ned: ServiceSpec,
    pub pdf_service: ServiceSpec,
    pub matching: MatchingMode,
    pub buffer_size: usize,
    pub cache_size: usize,
    pub lang: String,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            policy: FactorizationPolicy::default(),
            null_codes: NullCodes::defaults(),
            extractor: ExtractorSpec::Off,
            ned: ServiceSpec::Off,
            pdf_service: ServiceSpec::Off,
            matching: MatchingMode::default(),
            buffer_size: DEFAULT_BUFFER_SIZE,
            cache_size: DEFAULT_CACHE_SIZE,
            lang: "fr".to_string(),
        }
    }
}

impl BuildConfig {
    pub fn in_memory_store(&self) -> GraphStore {
        GraphStore::new(
            Box::new(crate::storage::MemoryBackend::default()),
            self.buffer_size,
            self.cache_size,
        )
    }
}

/// One dataset to ingest. Relational data is CSV with a header row and 2d
/// tables are JSON-encoded grids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetInput {
    pub name: String,
    pub model: DataModel,
    pub prov: Option<String>,
    pub data: Vec<u8>,
}

impl DatasetInput {
    pub fn new(model: DataModel, name: &str, data: impl Into<Vec<u8>>) -> Self {
        Self {
            name: name.to_string(),
            model,
            prov: None,
            data: data.into(),
        }
    }

    pub fn with_prov(mut self, prov: &str) -> Self {
        self.prov = Some(prov.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetFailure {
    pub dataset: String,
    pub error: String,
    pub retryable: bool,
}

/// Per-unit costs measured on a build, in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// Storing one edge.
    pub c1: f64,
    /// Storing one node plus its share of extraction.
    pub c2: f64,
    /// Disambiguating one entity occurrence.
    pub c3: f64,
    /// Comparing one candidate pair.
    pub c4: f64,
    pub edges: u64,
    pub nodes: u64,
    pub entity_occurrences: u64,
    pub pairs: u64,
}

impl CostModel {
    /// `c1·|E| + c2·|N| + c3·N_e + c4·pairs`.
    pub fn predicted_seconds(&self) -> f64 {
        self.c1 * self.edges as f64
            + self.c2 * self.nodes as f64
            + self.c3 * self.entity_occurrences as f64
            + self.c4 * self.pairs as f64
    }
}

fn per_unit(d: Duration, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        d.as_secs_f64() / n as f64
    }
}

mod seconds {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BuildReport {
    /// Graph totals after the build.
    pub nodes: u64,
    pub edges: u64,
    pub similar: u64,
    pub persons: usize,
    pub locations: usize,
    pub organizations: usize,
    #[serde(with = "seconds")]
    pub t_db: Duration,
    #[serde(with = "seconds")]
    pub t_e: Duration,
    #[serde(with = "seconds")]
    pub t_ned: Duration,
    #[serde(with = "seconds")]
    pub t_m: Duration,
    #[serde(with = "seconds")]
    pub t: Duration,
    pub unions: usize,
    pub linked_entities: usize,
    pub extraction_failures: usize,
    pub ned_failures: usize,
    pub failures: Vec<DatasetFailure>,
    pub datasets: Vec<(String, IngestReport)>,
    pub cost: CostModel,
}

impl BuildReport {
    pub const COLUMNS: [&'static str; 10] = [
        "|N|", "|E|", "T_DB", "T_E", "N_P", "N_L", "N_O", "T_NED", "T_m", "T",
    ];

    fn cells(&self) -> [String; 10] {
        let s = |d: Duration| format!("{:.3}", d.as_secs_f64());
        [
            self.nodes.to_string(),
            self.edges.to_string(),
            s(self.t_db),
            s(self.t_e),
            self.persons.to_string(),
            self.locations.to_string(),
            self.organizations.to_string(),
            s(self.t_ned),
            s(self.t_m),
            s(self.t),
        ]
    }

    /// Header and value rows, columns right-aligned.
    pub fn table(&self) -> String {
        let cells = self.cells();
        let widths: Vec<usize> = Self::COLUMNS
            .iter()
            .zip(&cells)
            .map(|(h, c)| h.chars().count().max(c.len()))
            .collect();
        let row = |items: Vec<&str>| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        format!(
            "{}\n{}\n",
            row(Self::COLUMNS.to_vec()),
            row(cells.iter().map(String::as_str).collect())
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs builds over one graph.
pub struct Builder {
    config: BuildConfig,
    graph: Graph,
    extractor: Option<Box<dyn Extractor>>,
    disambiguator: Option<Box<dyn Disambiguator>>,
    pdf: Option<Box<dyn PdfService>>,
    segmenter: Segmenter,
}

impl Builder {
    /// Opens the graph in `store` and sets up the services named in `config`.
    pub fn new(config: BuildConfig, store: GraphStore) -> Result<Self, BuildError> {
        let graph = Graph::open(store)?
            .with_policy(config.policy)
            .with_null_codes(config.null_codes.clone());
        let extractor: Option<Box<dyn Extractor>> = match &config.extractor {
            ExtractorSpec::Off => None,
            ExtractorSpec::Gazetteer(path) => Some(Box::new(
                Gazetteer::load(std::path::Path::new(path)).map_err(BuildError::Config)?,
            )),
            ExtractorSpec::Remote(url) => Some(remote_extractor(url, &config.lang)?),
        };
        let disambiguator = match &config.ned {
            ServiceSpec::Off => None,
            ServiceSpec::Remote(url) => Some(remote_disambiguator(url)?),
        };
        let pdf = match &config.pdf_service {
            ServiceSpec::Off => None,
            ServiceSpec::Remote(url) => Some(remote_pdf(url)?),
        };
        Ok(Self {
            config,
            graph,
            extractor,
            disambiguator,
            pdf,
            segmenter: Segmenter::default(),
        })
    }

    pub fn in_memory(config: BuildConfig) -> Result<Self, BuildError> {
        let store = config.in_memory_store();
        Self::new(config, store)
    }

    pub fn with_extractor(mut self, extractor: Box<dyn Extractor>) -> Self {
        self.extractor = Some(extractor);
        self
    }

    pub fn with_disambiguator(mut self, service: Box<dyn Disambiguator>) -> Self {
        self.disambiguator = Some(service);
        self
    }

    pub fn with_pdf_service(mut self, service: Box<dyn PdfService>) -> Self {
        self.pdf = Some(service);
        self
    }

    pub fn with_segmenter(mut self, segmenter: Segmenter) -> Self {
        self.segmenter = segmenter;
        self
    }

    pub fn config(&self) -> &BuildConfig {
        &self.config
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_mut(&mut self) -> &mut Graph {
        &mut self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    fn ingest_one(&mut self, input: &DatasetInput) -> Result<IngestReport, IngestError> {
        let g = &mut self.graph;
        let text = || {
            std::str::from_utf8(&input.data)
                .map_err(|e| IngestError::Parse(format!("not UTF-8: {e}")))
        };
        if input.model == DataModel::PdfDerived {
            let service = self
                .pdf
                .as_deref()
                .ok_or_else(|| IngestError::Parse("no PDF extraction service configured".into()))?;
            let uri = input
                .prov
                .clone()
                .unwrap_or_else(|| format!("file:///{}", input.name));
            let pdf = ingest_pdf(g, service, &input.data, &uri)?;
            let mut total = pdf.text.clone();
            for t in &pdf.tables {
                total.merge(&t.report);
            }
            total.rejected += pdf.skipped_tables;
            total.issues.extend(pdf.issues);
            return Ok(total);
        }
        let ds = g.register_named_dataset(input.model, &input.name, input.prov.as_deref())?;
        match input.model {
            DataModel::Relational => {
                ingest_csv(g, input.data.as_slice(), table_name(&input.name), true, ds)
            }
            DataModel::Rdf => ingest_rdf(g, input.data.as_slice(), ds),
            DataModel::Json => ingest_json(g, text()?, ds),
            DataModel::Xml => ingest_xml(g, text()?, ds),
            DataModel::Html => ingest_html(g, text()?, ds),
            DataModel::Text => ingest_text(g, text()?, &self.segmenter, ds),
            DataModel::Table2d => {
                let grid: Grid2d = serde_json::from_slice(&input.data)
                    .map_err(|e| IngestError::Parse(e.to_string()))?;
                Ok(ingest_2dtable(g, &grid, ds)?.report)
            }
            DataModel::PdfDerived => unreachable!("handled above"),
        }
    }

    /// Ingests `inputs`, then runs the configured stages over the whole graph.
    /// A dataset that fails is recorded in the report; the build goes on.
    pub fn build(&mut self, inputs: &[DatasetInput]) -> Result<BuildReport, BuildError> {
        let start = Instant::now();
        let before = self.graph.timings();
        let mut report = BuildReport::default();

        for input in inputs {
            match self.ingest_one(input) {
                Ok(r) => report.datasets.push((input.name.clone(), r)),
                Err(IngestError::Graph(e)) if !matches!(e, GraphError::Provenance(_)) => {
                    return Err(e.into())
                }
                Err(e) => report.failures.push(DatasetFailure {
                    dataset: input.name.clone(),
                    retryable: e.is_retryable(),
                    error: e.to_string(),
                }),
            }
        }
        let flush_start = Instant::now();
        self.graph.flush()?;
        let flush_time = flush_start.elapsed();

        let mut annotations = Vec::new();
        if let Some(extractor) = self.extractor.as_deref() {
            let ex = extract_graph(&mut self.graph, extractor)?;
            report.t_e = ex.elapsed;
            report.persons = ex.persons;
            report.locations = ex.locations;
            report.organizations = ex.organizations;
            report.extraction_failures = ex.failures;
            annotations = ex.annotations;
        }

        let mut mentions_sent = 0u64;
        if let Some(service) = self.disambiguator.as_deref() {
            let ned_start = Instant::now();
            let mut client = NedClient::new(service, &self.config.lang);
            for a in &annotations {
                let mentions: Vec<Mention> = a
                    .occurrences
                    .iter()
                    .map(|o| Mention {
                        start: o.start,
                        end: o.end,
                        entity_type: o.entity_type,
                    })
                    .collect();
                mentions_sent += mentions.len() as u64;
                for (entity, uri) in a.entities.iter().zip(client.resolve(&a.text, &mentions)) {
                    if let Some(uri) = uri {
                        link_entity(&mut self.graph, *entity, &uri)?;
                        report.linked_entities += 1;
                    }
                }
            }
            report.ned_failures = client.failures;
            report.t_ned = ned_start.elapsed();
        }

        let mut pairs = 0u64;
        if self.config.matching != MatchingMode::Off {
            let m_start = Instant::now();
            let outcome = match_graph(&mut self.graph, &self.config.matching.rules())?;
            report.unions = outcome.unions;
            pairs = outcome.compared as u64;
            report.t_m = m_start.elapsed();
        }
        self.graph.persist_representatives()?;
        let counts = self.graph.counts()?;

        let after = self.graph.timings();
        let node_time = after.nodes.saturating_sub(before.nodes);
        let edge_time = after.edges.saturating_sub(before.edges);
        let new_nodes = after.node_count - before.node_count;
        let new_edges = after.edge_count - before.edge_count;
        report.t_db = node_time + edge_time + flush_time;
        report.nodes = counts.nodes;
        report.edges = counts.edges;
        report.similar = counts.similar;
        report.cost = CostModel {
            c1: per_unit(edge_time, new_edges),
            c2: per_unit(node_time + report.t_e, new_nodes),
            c3: per_unit(report.t_ned, mentions_sent),
            c4: per_unit(report.t_m, pairs),
            edges: new_edges,
            nodes: new_nodes,
            entity_occurrences: mentions_sent,
            pairs,
        };
        report.t = start.elapsed();
        self.graph
            .store_mut()
            .put_meta(
                LAST_REPORT_META,
                serde_json::to_string(&report).expect("report serializes"),
            )
            .map_err(GraphError::from)?;
        self.graph.flush()?;
        Ok(report)
    }
}

/// Report of the last build persisted in `store`, if any.
pub fn last_report(store: &GraphStore) -> Result<Option<BuildReport>, GraphError> {
    match store.meta(LAST_REPORT_META)? {
        Some(json) => serde_json::from_str(&json)
            .map(Some)
            .map_err(|e| GraphError::Store(crate::error::StoreError::Backend(e.to_string()))),
        None => Ok(None),
    }
}

fn table_name(name: &str) -> &str {
    let base = name.rsplit(['/', '\\']).next().unwrap_or(name);
    base.split('.')
        .next()
        .filter(|s| !s.is_empty())
        .unwrap_or(base)
}

#[cfg(feature = "remote")]
fn remote_extractor(url: &str, lang: &str) -> Result<Box<dyn Extractor>, BuildError> {
    Ok(Box::new(crate::extract::RemoteExtractor::new(url, lang)))
}

#[cfg(feature = "remote")]
fn remote_disambiguator(url: &str) -> Result<Box<dyn Disambiguator>, BuildError> {
    Ok(Box::new(crate::ned::RemoteDisambiguator::new(url)))
}

#[cfg(feature = "remote")]
fn remote_pdf(url: &str) -> Result<Box<dyn PdfService>, BuildError> {
    Ok(Box::new(crate::ingest::HttpPdfService::new(url)))
}

#[cfg(not(feature = "remote"))]
fn remote_extractor(_: &str, _: &str) -> Result<Box<dyn Extractor>, BuildError> {
    Err(BuildError::Config(
        "built without remote service support".into(),
    ))
}

#[cfg(not(feature = "remote"))]
fn remote_disambiguator(_: &str) -> Result<Box<dyn Disambiguator>, BuildError> {
    Err(BuildError::Config(
        "built without remote service support".into(),
    ))
}

#[cfg(not(feature = "remote"))]
fn remote_pdf(_: &str) -> Result<Box<dyn PdfService>, BuildError> {
    Err(BuildError::Config(
        "built without remote service support".into(),
    ))
}
