use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::table2d::{ingest_2dtable, Grid2d, Table2dReport};
use super::{ingest_json_value, IngestReport};
use crate::error::{IngestError, ServiceError};
use crate::graph::Graph;
use crate::model::{labels, DataModel, DatasetId};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractedLine {
    pub line_number: u64,
    pub content: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractedText {
    pub lines: Vec<ExtractedLine>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractedTable {
    pub cells: Vec<Vec<String>>,
    pub header_rows: usize,
    pub header_cols: usize,
    #[serde(default)]
    pub page_number: u32,
}

/// Reply of the PDF extraction service.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PdfExtraction {
    pub text: ExtractedText,
    pub tables: Vec<ExtractedTable>,
    #[serde(default)]
    pub source_uri: String,
}

pub trait PdfService {
    fn extract(&self, pdf: &[u8], source_uri: &str) -> Result<PdfExtraction, ServiceError>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PdfIngestReport {
    /// Derived datasets: the text dataset first, then one per table.
    pub datasets: Vec<DatasetId>,
    pub text: IngestReport,
    pub tables: Vec<Table2dReport>,
    pub skipped_tables: usize,
    pub issues: Vec<String>,
}

/// Sends the PDF to `service` and maps its reply into derived datasets, each
/// linked to the PDF's URI by `cl:extractedFromPDF`.
pub fn ingest_pdf(
    graph: &mut Graph,
    service: &dyn PdfService,
    pdf: &[u8],
    source_uri: &str,
) -> Result<PdfIngestReport, IngestError> {
    let extraction = service.extract(pdf, source_uri)?;
    let uri = if extraction.source_uri.is_empty() {
        source_uri
    } else {
        extraction.source_uri.as_str()
    };
    let mut report = PdfIngestReport::default();

    let text_ds = derived_dataset(graph, DataModel::Json, uri)?;
    let mut lines = Map::new();
    for line in &extraction.text.lines {
        lines.insert(
            line.line_number.to_string(),
            Value::String(line.content.clone()),
        );
    }
    report.text = ingest_json_value(graph, &Value::Object(lines), text_ds)?;
    report.datasets.push(text_ds);

    for (i, table) in extraction.tables.iter().enumerate() {
        let grid = Grid2d {
            cells: table
                .cells
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| (!c.is_empty()).then(|| c.clone()))
                        .collect()
                })
                .collect(),
            header_rows: table.header_rows,
            header_cols: table.header_cols,
            merges: Vec::new(),
        };
        if let Err(e) = grid.validate() {
            report.skipped_tables += 1;
            report
                .issues
                .push(format!("table {i} (page {}): {e}", table.page_number));
            continue;
        }
        let ds = derived_dataset(graph, DataModel::Table2d, uri)?;
        report.tables.push(ingest_2dtable(graph, &grid, ds)?);
        report.datasets.push(ds);
    }
    Ok(report)
}

fn derived_dataset(
    graph: &mut Graph,
    model: DataModel,
    pdf_uri: &str,
) -> Result<DatasetId, IngestError> {
    let ds = graph.register_dataset(model, None)?;
    let node = graph.dataset(ds).expect("just registered").node;
    let target = graph.uri_node(pdf_uri, ds)?;
    graph.add_edge(node, target.id, labels::EXTRACTED_FROM_PDF, ds, 1.0)?;
    Ok(ds)
}

/// Client for the extraction service: `POST {base}/extract` with the PDF
/// bytes and the original location in `X-Source-Uri`.
#[cfg(feature = "remote")]
#[derive(Clone, Debug)]
pub struct HttpPdfService {
    endpoint: String,
    agent: ureq::Agent,
}

#[cfg(feature = "remote")]
impl HttpPdfService {
    pub fn new(base_url: &str) -> Self {
        Self {
            endpoint: format!("{}/extract", base_url.trim_end_matches('/')),
            agent: crate::remote::agent(),
        }
    }
}

#[cfg(feature = "remote")]
impl PdfService for HttpPdfService {
    fn extract(&self, pdf: &[u8], source_uri: &str) -> Result<PdfExtraction, ServiceError> {
        let response = self
            .agent
            .post(&self.endpoint)
            .header("Content-Type", "application/pdf")
            .header("X-Source-Uri", source_uri)
            .send(pdf);
        crate::remote::read_json(response)
    }
}
