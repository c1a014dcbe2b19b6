use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{Emitter, IngestReport};
use crate::error::IngestError;
use crate::graph::Graph;
use crate::model::{DatasetId, NodeId, NodeKind};
use crate::typing::LabelPath;

type Row = Vec<Option<String>>;

/// `column` of this table references `target_column` of `target_table`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ForeignKey {
    pub column: String,
    pub target_table: String,
    pub target_column: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RelationalInput {
    pub table_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
    #[serde(default)]
    pub foreign_keys: Vec<ForeignKey>,
}

/// Reads CSV into a relation. Empty fields are nulls. Without a header row
/// the columns are named `col1..colm`.
pub fn csv_to_relational(
    reader: impl Read,
    table_name: &str,
    has_header: bool,
) -> Result<RelationalInput, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_reader(reader);
    let mut columns: Vec<String> = if has_header {
        rdr.headers()
            .map_err(|e| IngestError::Parse(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect()
    } else {
        Vec::new()
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::Parse(e.to_string()))?;
        rows.push(
            rec.iter()
                .map(|v| (!v.is_empty()).then(|| v.to_string()))
                .collect::<Vec<_>>(),
        );
    }
    if !has_header {
        let width = rows.first().map_or(0, Vec::len);
        columns = (1..=width).map(|i| format!("col{i}")).collect();
    }
    Ok(RelationalInput {
        table_name: table_name.to_string(),
        columns,
        rows,
        foreign_keys: Vec::new(),
    })
}

pub fn ingest_csv(
    graph: &mut Graph,
    reader: impl Read,
    table_name: &str,
    has_header: bool,
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let input = csv_to_relational(reader, table_name, has_header)?;
    ingest_relational(graph, std::slice::from_ref(&input), ds)
}

/// Maps a set of relations: one table node per relation, one tuple node per
/// row, one value per non-null field, and one tuple-to-tuple edge per
/// foreign-key match.
pub fn ingest_relational(
    graph: &mut Graph,
    tables: &[RelationalInput],
    ds: DatasetId,
) -> Result<IngestReport, IngestError> {
    let mut em = Emitter::new(graph, ds)?;
    // tuple nodes of each table, aligned with its accepted rows
    let mut tuples: HashMap<&str, Vec<(NodeId, &Row)>> = HashMap::new();

    for table in tables {
        let table_node = em.fresh(&table.table_name, NodeKind::TableNode)?;
        em.anchor(table_node)?;
        let width = table.columns.len();
        let entry = tuples.entry(table.table_name.as_str()).or_default();
        for (i, row) in table.rows.iter().enumerate() {
            if row.len() != width {
                em.report.rejected += 1;
                em.report.issues.push(format!(
                    "{} row {}: {} values for {} columns",
                    table.table_name,
                    i + 1,
                    row.len(),
                    width
                ));
                continue;
            }
            let tuple = em.fresh("", NodeKind::TupleNode)?;
            em.edge(table_node, tuple, "")?;
            for (column, value) in table.columns.iter().zip(row) {
                let Some(value) = value else { continue };
                let path = LabelPath::root(ds).child(&table.table_name).child(column);
                let v = em.value(value, &path)?;
                em.edge(tuple, v, column)?;
            }
            entry.push((tuple, row));
        }
    }

    for table in tables {
        for fk in &table.foreign_keys {
            let Some(src_col) = table.columns.iter().position(|c| *c == fk.column) else {
                em.report.issues.push(format!(
                    "{}: unknown column {}",
                    table.table_name, fk.column
                ));
                continue;
            };
            let Some(target) = tables.iter().find(|t| t.table_name == fk.target_table) else {
                em.report
                    .issues
                    .push(format!("unknown referenced table {}", fk.target_table));
                continue;
            };
            let Some(dst_col) = target.columns.iter().position(|c| *c == fk.target_column) else {
                em.report.issues.push(format!(
                    "{}: unknown column {}",
                    fk.target_table, fk.target_column
                ));
                continue;
            };
            let mut index: HashMap<&str, Vec<NodeId>> = HashMap::new();
            for (node, row) in &tuples[fk.target_table.as_str()] {
                if let Some(v) = &row[dst_col] {
                    index.entry(v.as_str()).or_default().push(*node);
                }
            }
            let sources = tuples[table.table_name.as_str()].clone();
            for (node, row) in sources {
                let Some(v) = &row[src_col] else { continue };
                for &target_node in index.get(v.as_str()).into_iter().flatten() {
                    em.edge(node, target_node, &fk.column)?;
                }
            }
        }
    }
    Ok(em.finish())
}
